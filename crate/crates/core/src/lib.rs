pub mod gpc;
pub mod numerics;
pub mod plant;
pub mod sim;
pub mod stability;
