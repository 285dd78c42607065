#![allow(dead_code)]

pub mod grid;
pub mod master_equation;
