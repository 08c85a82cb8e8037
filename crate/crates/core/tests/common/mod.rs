#![allow(dead_code)]

pub mod expectimax;
pub mod oracle;
