//! Verified changes of variables between equations.
