"""Empirical side: extension counts, disjoint families, witnesses, FO estimates and fits."""
