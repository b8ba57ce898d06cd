//! Maximum-capture competitive facility location.
//!
//! A newcomer firm opens `r` facilities among candidate locations in a market
//! where competitors already operate. Customers in each zone pick a facility
//! according to a random-utility choice model (multinomial logit, mixed logit
//! or nested logit); the firm maximizes the expected number of customers it
//! captures.
//!
//! The crate is organised around four layers:
//!
//! * [`instance`]: zones, locations, distances, generators and file formats.
//! * [`choice`]: utility tables, choice probabilities, the capture objective,
//!   its continuous relaxation and gradient, and incremental swap evaluation.
//! * [`solver`]: exact enumeration, greedy, binary trust region, local search
//!   and their combinations.
//! * [`bench`]: the experiment grid, tie-aware best counts and report output.
//!
//! ```
//! use maxcap_core::{bitr_ls, build_utilities, generate_planar, Budget, ChoiceModelSpec,
//!                   GeneratorConfig, TrustRegionConfig};
//!
//! let inst = generate_planar(&GeneratorConfig::new(50, 25, 1))?;
//! let table = build_utilities(&inst, &ChoiceModelSpec::mnl(5.0, 0.1))?;
//! let (solution, report) =
//!     bitr_ls(&table, 4, 7, &TrustRegionConfig::default(), &Budget::seconds(60.0))?;
//! assert_eq!(solution.r(), 4);
//! assert!(report.objective > 0.0);
//! # Ok::<(), maxcap_core::Error>(())
//! ```

pub mod bench;
pub mod choice;
mod error;
pub mod instance;
pub mod solver;

pub use choice::{
    build_utilities, capture, capture_gradient, choice_probabilities, relaxed_capture,
    ChoiceModelSpec, EvalCache, ModelKind, NestParams, UtilityTable,
};
pub use error::{Error, Result};
pub use instance::{
    generate_planar, make_nests, GeneratorConfig, Instance, LocationId, NestSpec, Role, Violation,
};
pub use solver::{
    bitr, bitr_ls, bitr_multistart, exact_enumerate, greedy, local_search, random_solution,
    tr_subproblem, Budget, Solution, SolverReport, TrustRegionConfig,
};
