"""Symbolic calculus of Kontsevich graphs and the loopless star product obstruction."""
