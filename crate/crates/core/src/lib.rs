pub mod cat;
pub mod coalgebra;
pub mod comonad;
pub mod exactness;
pub mod format;
pub mod ideal;
pub mod pretorsion;
pub mod ses;
