"""Exact bit-string operator algebra, Cantor-set approximations, dyadic number theory,
Bell-type experiments over finite sample spaces and Lorenz symbolic dynamics."""

__version__ = "0.1.0"
