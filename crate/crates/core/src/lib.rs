pub mod bohr;
pub mod certify;
pub mod exactreal;
pub mod experiments;
pub mod hardy;
pub mod largeness;
pub mod returnsets;
pub mod span;
