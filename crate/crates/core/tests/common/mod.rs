#![allow(dead_code)]

pub mod fig8;
pub mod models;
pub mod oracle;
pub mod runs;
