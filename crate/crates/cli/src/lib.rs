pub mod cli;
pub mod pad;
pub mod par;
pub mod planefile;
pub mod report;
