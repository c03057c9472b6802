pub mod analyze;
pub mod oracle;
pub mod run;
pub mod serve;
pub mod sweep;
