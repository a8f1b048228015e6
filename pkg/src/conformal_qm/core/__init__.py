"""Core numerics: units, special functions, eigenstates, the map and its operators."""
