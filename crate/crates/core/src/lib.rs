pub mod cli;
pub mod elliptic;
pub mod error;
pub mod families;
pub mod flow;
pub mod immersion;
pub mod iwasawa;
pub mod loop_algebra;
pub mod mat2;
pub mod mesh;
pub mod output;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod spectral;
pub mod verify;
