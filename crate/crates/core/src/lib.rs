pub mod algebra;
pub mod bundle;
pub mod cartan;
pub mod graph;
pub mod cover;
pub mod factor;
pub mod parabolic;
pub mod generate;
pub mod io;
pub mod selftest;
