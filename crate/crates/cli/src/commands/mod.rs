//! One module per subcommand.

pub mod accept;
pub mod ambiguity;
pub mod compare;
pub mod generate;
pub mod simulate;
pub mod verify;
