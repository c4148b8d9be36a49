"""Functions of pairs of noncommuting Hermitian matrices: double and triple
operator integrals, sinc representations of divided differences, Besov-type
norm estimates and the Schur-multiplier counterexample."""

__version__ = "0.1.0"
