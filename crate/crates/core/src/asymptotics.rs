//! Connection formulae and asymptotic fits.
