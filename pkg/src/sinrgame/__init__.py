"""Game-theoretic capacity of wireless links in the SINR model."""
