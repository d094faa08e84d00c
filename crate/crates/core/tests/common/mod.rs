#![allow(dead_code)]

pub mod strategies;
pub mod table;
pub mod traces;
