//! Finite A-infinity categories over F2.

pub mod bimodule;
pub mod calabi_yau;
pub mod category;
pub mod corpus;
pub mod functor;
pub mod gf2;
pub mod hochschild;
pub mod modfun;
pub mod tensor;
