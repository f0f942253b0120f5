//! Combinatorial 2-complexes of type Aut(F2).
//!
//! Builds the toric presentations `B_n`, checks vertex links against the
//! Brady link, grows balls of the universal cover, and verifies the
//! pinch-and-fill, cobordism and exotic-complex constructions with exact
//! integer arithmetic.

pub mod cobordism;
pub mod complex;
pub mod complex_iso;
pub mod error;
pub mod exotic;
pub mod iso;
pub mod link;
pub mod pinchfill;
pub mod report;
pub mod rigidity;
pub mod toric;
pub mod typesys;

pub use complex::{AngleUnits, Complex2, Corner, Edge, EdgeEnd, End, Face, Traversal};
pub use error::{CobordismError, ComplexError, PinchError, RigidityError, ToricError};
pub use iso::{find_isomorphism, GraphIsoWitness, IsoMode};
pub use link::{compute_link, LinkGraph};
