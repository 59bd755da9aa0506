//! Runtime companion to `ftp-sdmm-core`: the wire format, an in-process
//! simulator with a traffic ledger, a TCP server and runner, rate tables and
//! the `ftp-sdmm` command line.

pub mod cli;
pub mod config;
pub mod ledger;
pub mod message;
pub mod net;
pub mod rates;
pub mod sim;
pub mod wire;
