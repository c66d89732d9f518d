"""DoA Cramer-Rao bounds for antenna arrays behind an RF lens."""
