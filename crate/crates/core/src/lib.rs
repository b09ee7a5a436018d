pub mod describe;
pub mod element_ref;
pub mod markup;
pub mod matcher;
pub mod rdf;
pub mod registry;
pub mod template;
