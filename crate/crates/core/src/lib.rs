pub mod datastore;
pub mod interface;
pub mod interpreter;
pub mod lex;
pub mod queryengine;
pub mod session;
pub mod timeparse;
