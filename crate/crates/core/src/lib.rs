pub mod diagram;
pub mod error;
pub mod families;
pub mod laurent;
pub mod linalg;
pub mod qa;
pub mod statesum;
pub mod tait;
pub mod table;
pub mod tangle;
