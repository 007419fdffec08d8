pub mod calculus;
pub mod coherent;
pub mod error;
pub mod fock;
pub mod numbers;
pub mod susy;
pub mod verify;
