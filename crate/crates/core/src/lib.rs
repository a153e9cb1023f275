pub mod exec;
pub mod smallcancel;
pub mod words;
pub mod graphprod;
pub mod coxeter;
pub mod abels;
pub mod thompson;
pub mod indfam;
pub mod chabauty;
pub mod io;
