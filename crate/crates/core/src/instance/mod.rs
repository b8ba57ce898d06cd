//! Problem instances: zones with demand, candidate and competitor locations,
//! and the zone-by-location distance matrix.

mod canonical;
mod orlib;

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use canonical::{load_canonical, save_canonical, FORMAT_HEADER};
pub use orlib::parse_orlib;

/// Index of a location (candidate or competitor) in an [`Instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocationId(pub usize);

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Candidate,
    Competitor,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Candidate => "candidate",
            Role::Competitor => "competitor",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Meta {
    pub name: Option<String>,
    pub generator: Option<String>,
    pub seed: Option<u64>,
}

/// Planar positions kept for provenance only; solvers never read them.
#[derive(Debug, Clone, PartialEq)]
pub struct Coordinates {
    pub zones: Vec<(f64, f64)>,
    pub locations: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    /// Customers per zone, indexed by zone id.
    pub demands: Vec<f64>,
    /// Locations where the newcomer may open, ascending ids.
    pub candidates: Vec<LocationId>,
    /// Locations already served by competitors, ascending ids.
    pub competitors: Vec<LocationId>,
    /// Zone-major matrix: `distances[zone * n_locations + location]`.
    pub distances: Vec<f64>,
    pub meta: Meta,
    pub coordinates: Option<Coordinates>,
}

impl Instance {
    /// Builds an instance and rejects it if any invariant fails.
    pub fn new(
        demands: Vec<f64>,
        candidates: Vec<LocationId>,
        competitors: Vec<LocationId>,
        distances: Vec<f64>,
    ) -> Result<Self> {
        let instance = Instance {
            demands,
            candidates,
            competitors,
            distances,
            meta: Meta::default(),
            coordinates: None,
        };
        instance.check()?;
        Ok(instance)
    }

    pub fn n_zones(&self) -> usize {
        self.demands.len()
    }

    pub fn n_locations(&self) -> usize {
        self.candidates.len() + self.competitors.len()
    }

    pub fn distance(&self, zone: usize, location: LocationId) -> f64 {
        self.distances[zone * self.n_locations() + location.0]
    }

    pub fn role(&self, location: LocationId) -> Option<Role> {
        if self.candidates.binary_search(&location).is_ok() {
            Some(Role::Candidate)
        } else if self.competitors.binary_search(&location).is_ok() {
            Some(Role::Competitor)
        } else {
            None
        }
    }

    pub fn total_demand(&self) -> f64 {
        self.demands.iter().sum()
    }

    /// Reports every invariant violation; an empty list means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n_loc = self.n_locations();

        if self.demands.is_empty() {
            out.push(Violation::NoZones);
        }
        for (zone, &q) in self.demands.iter().enumerate() {
            if !(q.is_finite() && q > 0.0) {
                out.push(Violation::NonPositiveDemand { zone, demand: q });
            }
        }
        if self.candidates.is_empty() {
            out.push(Violation::NoCandidates);
        }
        if self.competitors.is_empty() {
            out.push(Violation::NoCompetitors);
        }

        let mut owner: Vec<Option<Role>> = vec![None; n_loc];
        let roles = self
            .candidates
            .iter()
            .map(|&l| (l, Role::Candidate))
            .chain(self.competitors.iter().map(|&l| (l, Role::Competitor)));
        for (loc, role) in roles {
            match owner.get_mut(loc.0) {
                None => out.push(Violation::LocationOutOfRange { location: loc.0 }),
                Some(slot @ None) => *slot = Some(role),
                Some(Some(prev)) => out.push(Violation::DuplicateLocation {
                    location: loc.0,
                    first: *prev,
                    second: role,
                }),
            }
        }
        if !self.candidates.windows(2).all(|w| w[0] < w[1])
            || !self.competitors.windows(2).all(|w| w[0] < w[1])
        {
            out.push(Violation::UnsortedLocations);
        }

        let expected = self.n_zones() * n_loc;
        if self.distances.len() != expected {
            out.push(Violation::ShapeMismatch {
                expected,
                found: self.distances.len(),
            });
        } else {
            for (k, &c) in self.distances.iter().enumerate() {
                if !(c.is_finite() && c >= 0.0) {
                    out.push(Violation::BadDistance {
                        zone: k / n_loc,
                        location: k % n_loc,
                        value: c,
                    });
                }
            }
        }
        out
    }

    pub(crate) fn check(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(violations))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoZones,
    NoCandidates,
    NoCompetitors,
    NonPositiveDemand { zone: usize, demand: f64 },
    BadDistance { zone: usize, location: usize, value: f64 },
    ShapeMismatch { expected: usize, found: usize },
    LocationOutOfRange { location: usize },
    DuplicateLocation { location: usize, first: Role, second: Role },
    UnsortedLocations,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoZones => write!(f, "instance has no zones"),
            Violation::NoCandidates => write!(f, "instance has no candidate locations"),
            Violation::NoCompetitors => write!(f, "instance has no competitor locations"),
            Violation::NonPositiveDemand { zone, demand } => {
                write!(f, "zone {zone} has non-positive demand {demand}")
            }
            Violation::BadDistance { zone, location, value } => {
                write!(f, "distance ({zone}, {location}) = {value} is negative or non-finite")
            }
            Violation::ShapeMismatch { expected, found } => {
                write!(f, "distance matrix has {found} entries, expected {expected}")
            }
            Violation::LocationOutOfRange { location } => {
                write!(f, "location {location} is outside the distance matrix")
            }
            Violation::DuplicateLocation { location, first, second } => write!(
                f,
                "location {location} listed as both {} and {}",
                first.as_str(),
                second.as_str()
            ),
            Violation::UnsortedLocations => write!(f, "location lists are not strictly ascending"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub n_zones: usize,
    pub n_candidates: usize,
    pub n_competitors: usize,
    pub side: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(n_zones: usize, n_candidates: usize, seed: u64) -> Self {
        GeneratorConfig {
            n_zones,
            n_candidates,
            n_competitors: 5,
            side: 1.0,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n_zones == 0 || self.n_candidates == 0 || self.n_competitors == 0 {
            return Err(Error::InvalidArgument(
                "zone, candidate and competitor counts must all be at least 1".into(),
            ));
        }
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "square side must be positive, got {}",
                self.side
            )));
        }
        Ok(())
    }
}

/// Places zones, candidates and competitors uniformly in a square and uses
/// Euclidean distances. Candidates take ids `0..n_candidates`, competitors
/// follow. Demands are uniform integers in `[1, 100]`.
pub fn generate_planar(config: &GeneratorConfig) -> Result<Instance> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let side = config.side;
    let point = |rng: &mut ChaCha8Rng| (rng.random::<f64>() * side, rng.random::<f64>() * side);

    let zones: Vec<(f64, f64)> = (0..config.n_zones).map(|_| point(&mut rng)).collect();
    let n_loc = config.n_candidates + config.n_competitors;
    let locations: Vec<(f64, f64)> = (0..n_loc).map(|_| point(&mut rng)).collect();
    let demands: Vec<f64> = (0..config.n_zones)
        .map(|_| rng.random_range(1..=100u32) as f64)
        .collect();

    let mut distances = Vec::with_capacity(config.n_zones * n_loc);
    for &(zx, zy) in &zones {
        distances.extend(locations.iter().map(|&(lx, ly)| (zx - lx).hypot(zy - ly)));
    }

    let mut instance = Instance::new(
        demands,
        (0..config.n_candidates).map(LocationId).collect(),
        (config.n_candidates..n_loc).map(LocationId).collect(),
        distances,
    )?;
    instance.meta = Meta {
        name: Some(format!("planar-{}-{}-{}", config.n_zones, config.n_candidates, config.seed)),
        generator: Some("planar".into()),
        seed: Some(config.seed),
    };
    instance.coordinates = Some(Coordinates { zones, locations });
    Ok(instance)
}

/// Assignment of every location to one nest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestSpec {
    /// Nest index per location id.
    pub assignment: Vec<usize>,
    pub n_nests: usize,
}

impl NestSpec {
    pub fn members(&self, nest: usize) -> Vec<LocationId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &n)| n == nest)
            .map(|(l, _)| LocationId(l))
            .collect()
    }
}

/// Splits all locations, ordered by id, into `n_groups` contiguous groups whose
/// sizes differ by at most one (larger groups first).
pub fn make_nests(instance: &Instance, n_groups: usize) -> Result<NestSpec> {
    let n = instance.n_locations();
    if n_groups == 0 || n_groups > n {
        return Err(Error::InvalidArgument(format!(
            "nest count must be in 1..={n}, got {n_groups}"
        )));
    }
    let base = n / n_groups;
    let extra = n % n_groups;
    let mut assignment = Vec::with_capacity(n);
    for group in 0..n_groups {
        let size = base + usize::from(group < extra);
        assignment.extend(std::iter::repeat_n(group, size));
    }
    Ok(NestSpec {
        assignment,
        n_nests: n_groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Instance {
        Instance::new(
            vec![3.0, 7.0],
            vec![LocationId(0), LocationId(1)],
            vec![LocationId(2)],
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        )
        .unwrap()
    }

    #[test]
    fn generated_instance_is_valid_and_shaped() {
        let inst = generate_planar(&GeneratorConfig::new(50, 25, 1)).unwrap();
        assert!(inst.validate().is_empty());
        assert_eq!(inst.n_zones(), 50);
        assert_eq!(inst.n_locations(), 30);
        assert_eq!(inst.distances.len(), 50 * 30);
        let max = std::f64::consts::SQRT_2;
        assert!(inst.distances.iter().all(|&c| (0.0..=max).contains(&c)));
        assert!(inst.demands.iter().all(|&q| (1.0..=100.0).contains(&q) && q.fract() == 0.0));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_planar(&GeneratorConfig::new(20, 10, 9)).unwrap();
        let b = generate_planar(&GeneratorConfig::new(20, 10, 9)).unwrap();
        let c = generate_planar(&GeneratorConfig::new(20, 10, 10)).unwrap();
        assert_eq!(save_canonical(&a), save_canonical(&b));
        assert_ne!(a.distances, c.distances);
    }

    #[test]
    fn zero_counts_rejected() {
        let mut cfg = GeneratorConfig::new(0, 5, 1);
        assert!(generate_planar(&cfg).is_err());
        cfg.n_zones = 5;
        cfg.n_competitors = 0;
        assert!(generate_planar(&cfg).is_err());
    }

    #[test]
    fn negative_distance_is_reported_with_position() {
        let mut inst = tiny();
        inst.distances[4] = -1.0;
        let v = inst.validate();
        assert_eq!(
            v,
            vec![Violation::BadDistance {
                zone: 1,
                location: 1,
                value: -1.0
            }]
        );
    }

    #[test]
    fn overlapping_roles_are_reported() {
        let mut inst = tiny();
        inst.competitors = vec![LocationId(1)];
        let v = inst.validate();
        assert!(v.iter().any(|x| matches!(
            x,
            Violation::DuplicateLocation { location: 1, .. }
        )));
    }

    #[test]
    fn zero_demand_and_missing_competitors() {
        let err = Instance::new(vec![0.0], vec![LocationId(0)], vec![], vec![1.0]).unwrap_err();
        let Error::Invalid(v) = err else { panic!() };
        assert!(v.contains(&Violation::NonPositiveDemand { zone: 0, demand: 0.0 }));
        assert!(v.contains(&Violation::NoCompetitors));
    }

    fn nest_sizes(spec: &NestSpec) -> Vec<usize> {
        (0..spec.n_nests).map(|n| spec.members(n).len()).collect()
    }

    fn instance_with_locations(n: usize) -> Instance {
        Instance::new(
            vec![1.0],
            (0..n - 1).map(LocationId).collect(),
            vec![LocationId(n - 1)],
            vec![0.5; n],
        )
        .unwrap()
    }

    #[test]
    fn ten_locations_five_groups_are_consecutive_pairs() {
        let spec = make_nests(&instance_with_locations(10), 5).unwrap();
        assert_eq!(spec.assignment, vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert_eq!(spec.members(2), vec![LocationId(4), LocationId(5)]);
    }

    #[test]
    fn fifty_nine_locations_balance() {
        let spec = make_nests(&instance_with_locations(59), 5).unwrap();
        assert_eq!(nest_sizes(&spec), vec![12, 12, 12, 12, 11]);
    }

    #[test]
    fn singleton_nests_and_range_errors() {
        let inst = instance_with_locations(7);
        let spec = make_nests(&inst, 7).unwrap();
        assert_eq!(spec.assignment, (0..7).collect::<Vec<_>>());
        assert!(make_nests(&inst, 0).is_err());
        assert!(make_nests(&inst, 8).is_err());
    }

    #[test]
    fn nests_partition_with_balanced_sizes() {
        for n in 1..40 {
            let inst = instance_with_locations(n.max(2));
            for g in 1..=inst.n_locations() {
                let spec = make_nests(&inst, g).unwrap();
                let sizes = nest_sizes(&spec);
                assert_eq!(sizes.iter().sum::<usize>(), inst.n_locations());
                let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
                assert!(hi - lo <= 1);
                assert!(spec.assignment.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
