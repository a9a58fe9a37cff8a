//! The hierarchical selection model itself.
//!
//! An instance partitions `N` objects into `M` hierarchies. Hierarchy `h = 1`
//! is the top: it carries the largest selection weight and, under the usual
//! parameterizations, the smallest object count. Each selection draws a
//! hierarchy from `fc`, then an object within it from that hierarchy's own
//! `fw` pmf; the within-hierarchy pmfs are fixed for the whole run (rank
//! positions never change mid-run, there is no reinforcement).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dist::{make_pmf, DistError, DistributionSpec, Pmf};
use crate::rng;

/// Everything needed to build a model instance.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchySpec {
    /// Total number of objects N.
    pub n_objects: usize,
    /// Number of hierarchies M.
    pub n_hierarchies: usize,
    /// Family for apportioning object counts across hierarchies.
    pub fm: DistributionSpec,
    /// Family for within-hierarchy selection (re-instantiated per hierarchy
    /// over that hierarchy's own support size).
    pub fw: DistributionSpec,
    /// Family for hierarchy selection.
    pub fc: DistributionSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    /// N < M: cannot give every hierarchy at least one object.
    TooFewObjects { n_objects: usize, n_hierarchies: usize },
    /// M = 0.
    NoHierarchies,
    Dist(DistError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::TooFewObjects { n_objects, n_hierarchies } => write!(
                f,
                "need at least one object per hierarchy: N = {n_objects} < M = {n_hierarchies}"
            ),
            ModelError::NoHierarchies => write!(f, "model needs at least one hierarchy"),
            ModelError::Dist(e) => write!(f, "distribution error: {e}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<DistError> for ModelError {
    fn from(e: DistError) -> Self {
        ModelError::Dist(e)
    }
}

/// Non-fatal conditions noticed while building an instance.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelWarning {
    /// The model assumes M ≪ N; flag M > N/10 as suspicious but legal.
    ManyHierarchies { n_objects: usize, n_hierarchies: usize },
}

impl fmt::Display for ModelWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelWarning::ManyHierarchies { n_objects, n_hierarchies } => write!(
                f,
                "M = {n_hierarchies} is more than a tenth of N = {n_objects}; \
                 the model is intended for M \u{226a} N"
            ),
        }
    }
}

/// A realized model: hierarchy sizes plus all selection pmfs.
#[derive(Clone, Debug)]
pub struct ModelInstance {
    counts: Vec<usize>,
    fc_pmf: Pmf,
    fw_pmfs: Vec<Pmf>,
    /// Global object id of the first object in each hierarchy.
    offsets: Vec<usize>,
    warnings: Vec<ModelWarning>,
}

/// One object's bookkeeping row. `hierarchy` and `within_rank` are one-based;
/// `object_id` is the zero-based global index (hierarchy-major order).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectRow {
    pub object_id: usize,
    pub hierarchy: usize,
    pub within_rank: usize,
    pub count: f64,
}

/// Per-object frequencies from a simulation or an exact expectation.
///
/// One row per object (rows sorted by `object_id`), counts ≥ 0, and
/// `total` equal to the sum of counts (exactly T for Monte-Carlo runs).
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTable {
    pub rows: Vec<ObjectRow>,
    pub total: f64,
}

/// Largest-remainder apportionment of `n` over `probs`, ties in the
/// fractional remainders broken toward the lower index.
fn apportion(n: usize, probs: &[f64]) -> Vec<usize> {
    let m = probs.len();
    let mut counts: Vec<usize> = Vec::with_capacity(m);
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(m);
    let mut assigned = 0usize;
    for (i, &p) in probs.iter().enumerate() {
        let quota = n as f64 * p;
        let floor = quota as usize; // quota >= 0
        counts.push(floor);
        assigned += floor;
        remainders.push((quota - floor as f64, i));
    }
    // Largest remainder first; equal remainders go to the lower index.
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Raises every zero count to one, taking the deficit from the currently
/// largest hierarchy (lowest index among ties). Requires n ≥ m.
fn clamp_minimum_one(counts: &mut [usize]) {
    for i in 0..counts.len() {
        if counts[i] == 0 {
            let donor = (0..counts.len())
                .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
                .expect("non-empty counts");
            debug_assert!(counts[donor] > 1);
            counts[donor] -= 1;
            counts[i] = 1;
        }
    }
}

/// Builds a model instance: apportions N over `make_pmf(fm, M)`, clamps every
/// hierarchy to at least one object, and realizes the selection pmfs.
pub fn build_instance(spec: &HierarchySpec) -> Result<ModelInstance, ModelError> {
    let (n, m) = (spec.n_objects, spec.n_hierarchies);
    if m == 0 {
        return Err(ModelError::NoHierarchies);
    }
    if n < m {
        return Err(ModelError::TooFewObjects { n_objects: n, n_hierarchies: m });
    }

    let mut warnings = Vec::new();
    if m > n / 10 {
        warnings.push(ModelWarning::ManyHierarchies { n_objects: n, n_hierarchies: m });
    }

    let fm_pmf = make_pmf(&spec.fm, m)?;
    let mut counts = apportion(n, fm_pmf.probs());
    clamp_minimum_one(&mut counts);
    debug_assert_eq!(counts.iter().sum::<usize>(), n);

    let fc_pmf = make_pmf(&spec.fc, m)?;
    let fw_pmfs: Result<Vec<Pmf>, DistError> =
        counts.iter().map(|&n_h| make_pmf(&spec.fw, n_h)).collect();

    let mut offsets = Vec::with_capacity(m);
    let mut base = 0usize;
    for &c in &counts {
        offsets.push(base);
        base += c;
    }

    Ok(ModelInstance { counts, fc_pmf, fw_pmfs: fw_pmfs?, offsets, warnings })
}

impl ModelInstance {
    /// Object count per hierarchy, `h = 1` first.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n_objects(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn n_hierarchies(&self) -> usize {
        self.counts.len()
    }

    pub fn fc_pmf(&self) -> &Pmf {
        &self.fc_pmf
    }

    pub fn fw_pmfs(&self) -> &[Pmf] {
        &self.fw_pmfs
    }

    pub fn warnings(&self) -> &[ModelWarning] {
        &self.warnings
    }

    /// (one-based hierarchy, one-based within rank) for a global object id.
    fn locate(&self, object_id: usize) -> (usize, usize) {
        let h = self.offsets.partition_point(|&o| o <= object_id) - 1;
        (h + 1, object_id - self.offsets[h] + 1)
    }
}

/// Per-object selection probabilities, in global object order:
/// `p(h, j) = fc[h] · fw_h[j]`. Sums to 1 within 1e-10.
pub fn exact_pmf(inst: &ModelInstance) -> Vec<f64> {
    let mut p = Vec::with_capacity(inst.n_objects());
    for (h, fw) in inst.fw_pmfs.iter().enumerate() {
        let ph = inst.fc_pmf.probs()[h];
        p.extend(fw.probs().iter().map(|&pw| ph * pw));
    }
    p
}

fn table_from_counts(inst: &ModelInstance, counts: Vec<f64>, total: f64) -> FrequencyTable {
    let rows = counts
        .into_iter()
        .enumerate()
        .map(|(object_id, count)| {
            let (hierarchy, within_rank) = inst.locate(object_id);
            ObjectRow { object_id, hierarchy, within_rank, count }
        })
        .collect();
    FrequencyTable { rows, total }
}

/// `draws` two-step selections (hierarchy via `fc`, then within-rank via that
/// hierarchy's `fw`). Deterministic in `(inst, draws, seed)`; counts sum to
/// exactly `draws`.
pub fn simulate(inst: &ModelInstance, draws: u64, seed: u64) -> FrequencyTable {
    let mut rng = rng::stream(seed);
    let mut counts = alloc::vec![0u64; inst.n_objects()];
    for _ in 0..draws {
        let h = inst.fc_pmf.sample(&mut rng);
        let j = inst.fw_pmfs[h].sample(&mut rng);
        counts[inst.offsets[h] + j] += 1;
    }
    table_from_counts(inst, counts.into_iter().map(|c| c as f64).collect(), draws as f64)
}

/// The noise-free limit of [`simulate`]: `count(o) = draws · exact_pmf(o)`.
pub fn expected_frequencies(inst: &ModelInstance, draws: u64) -> FrequencyTable {
    let t = draws as f64;
    let counts: Vec<f64> = exact_pmf(inst).into_iter().map(|p| t * p).collect();
    table_from_counts(inst, counts, t)
}

/// Formats instance warnings for CLI display.
pub fn format_warnings(inst: &ModelInstance) -> Vec<String> {
    inst.warnings.iter().map(|w| alloc::format!("{w}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Orientation;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn spec(n: usize, m: usize, fm: DistributionSpec) -> HierarchySpec {
        HierarchySpec {
            n_objects: n,
            n_hierarchies: m,
            fm,
            fw: DistributionSpec::Uniform,
            fc: DistributionSpec::Uniform,
        }
    }

    #[test]
    fn uniform_split_is_even() {
        let inst = build_instance(&spec(100, 4, DistributionSpec::Uniform)).unwrap();
        assert_eq!(inst.counts(), &[25, 25, 25, 25]);
        assert!(inst.warnings().is_empty());
    }

    #[test]
    fn ascending_triangle_gives_top_the_fewest() {
        let inst = build_instance(&spec(
            60,
            3,
            DistributionSpec::Triangular { ratio: 3.0, orientation: Orientation::Ascending },
        ))
        .unwrap();
        assert_eq!(inst.counts(), &[10, 20, 30]);
    }

    #[test]
    fn clamp_floor_keeps_every_hierarchy_alive() {
        let inst = build_instance(&spec(5, 5, DistributionSpec::Uniform)).unwrap();
        assert_eq!(inst.counts(), &[1, 1, 1, 1, 1]);

        // Extreme skew drives small hierarchies to zero before the clamp.
        let inst = build_instance(&spec(
            12,
            4,
            DistributionSpec::Power { exponent: 6.0 },
        ))
        .unwrap();
        assert_eq!(inst.counts().iter().sum::<usize>(), 12);
        assert!(inst.counts().iter().all(|&c| c >= 1));
    }

    #[test]
    fn too_few_objects_is_an_error_and_many_hierarchies_a_warning() {
        let err = build_instance(&spec(3, 4, DistributionSpec::Uniform)).unwrap_err();
        assert_eq!(err, ModelError::TooFewObjects { n_objects: 3, n_hierarchies: 4 });
        let inst = build_instance(&spec(20, 4, DistributionSpec::Uniform)).unwrap();
        assert_eq!(
            inst.warnings(),
            &[ModelWarning::ManyHierarchies { n_objects: 20, n_hierarchies: 4 }]
        );
    }

    #[test]
    fn exact_pmf_reduces_to_fw_for_single_hierarchy() {
        let inst = build_instance(&HierarchySpec {
            n_objects: 6,
            n_hierarchies: 1,
            fm: DistributionSpec::Uniform,
            fw: DistributionSpec::Power { exponent: 1.0 },
            fc: DistributionSpec::Uniform,
        })
        .unwrap();
        let p = exact_pmf(&inst);
        assert_eq!(p, inst.fw_pmfs()[0].probs());
    }

    #[test]
    fn exact_pmf_is_a_product_of_the_two_steps() {
        // fc = [0.75, 0.25] via explicit weights, one object per hierarchy.
        let inst = build_instance(&HierarchySpec {
            n_objects: 2,
            n_hierarchies: 2,
            fm: DistributionSpec::Uniform,
            fw: DistributionSpec::Uniform,
            fc: DistributionSpec::Explicit { weights: vec![3.0, 1.0] },
        })
        .unwrap();
        let p = exact_pmf(&inst);
        assert_abs_diff_eq!(p[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.25, epsilon = 1e-15);

        let table = expected_frequencies(&inst, 100);
        assert_abs_diff_eq!(table.rows[0].count, 75.0, epsilon = 1e-12);
        assert_abs_diff_eq!(table.rows[1].count, 25.0, epsilon = 1e-12);
    }

    #[test]
    fn full_uniformity_spreads_mass_evenly() {
        let inst = build_instance(&spec(4, 2, DistributionSpec::Uniform)).unwrap();
        for p in exact_pmf(&inst) {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-15);
        }
        let table = expected_frequencies(&inst, 100);
        for row in &table.rows {
            assert_abs_diff_eq!(row.count, 25.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_pmf_sums_to_one() {
        let inst = build_instance(&HierarchySpec {
            n_objects: 1234,
            n_hierarchies: 7,
            fm: DistributionSpec::ShiftedPower { exponent: 2.094 },
            fw: DistributionSpec::Power { exponent: 0.82 },
            fc: DistributionSpec::Power { exponent: 3.791 },
        })
        .unwrap();
        let total: f64 = exact_pmf(&inst).iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn simulate_conserves_draws_and_is_reproducible() {
        let inst = build_instance(&spec(50, 5, DistributionSpec::Uniform)).unwrap();
        let a = simulate(&inst, 10_000, 42);
        let b = simulate(&inst, 10_000, 42);
        let c = simulate(&inst, 10_000, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let total: f64 = a.rows.iter().map(|r| r.count).sum();
        assert_eq!(total, 10_000.0);
        assert_eq!(a.total, 10_000.0);
    }

    #[test]
    fn single_object_receives_every_draw() {
        let inst = build_instance(&spec(1, 1, DistributionSpec::Uniform)).unwrap();
        let table = simulate(&inst, 10, 7);
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].count, 10.0);
        assert_eq!(table.rows[0].hierarchy, 1);
        assert_eq!(table.rows[0].within_rank, 1);
    }

    #[test]
    fn rows_carry_hierarchy_major_coordinates() {
        let inst = build_instance(&spec(
            6,
            2,
            DistributionSpec::Triangular { ratio: 2.0, orientation: Orientation::Ascending },
        ))
        .unwrap();
        assert_eq!(inst.counts(), &[2, 4]);
        let table = expected_frequencies(&inst, 1);
        let coords: Vec<(usize, usize, usize)> =
            table.rows.iter().map(|r| (r.object_id, r.hierarchy, r.within_rank)).collect();
        assert_eq!(
            coords,
            vec![(0, 1, 1), (1, 1, 2), (2, 2, 1), (3, 2, 2), (4, 2, 3), (5, 2, 4)]
        );
    }

    #[test]
    fn monte_carlo_tracks_exact_probabilities() {
        let inst = build_instance(&HierarchySpec {
            n_objects: 8,
            n_hierarchies: 2,
            fm: DistributionSpec::Uniform,
            fw: DistributionSpec::Uniform,
            fc: DistributionSpec::Explicit { weights: vec![2.0, 1.0] },
        })
        .unwrap();
        // All p = {1/6, 1/12} are comfortably large: at T = 10^7 the 5-sigma
        // relative half-width is under 1%.
        let draws = 10_000_000u64;
        let table = simulate(&inst, draws, 2025);
        for (row, p) in table.rows.iter().zip(exact_pmf(&inst)) {
            let expected = draws as f64 * p;
            let rel = (row.count - expected).abs() / expected;
            assert!(rel < 0.01, "object {} off by {rel}", row.object_id);
        }
    }
}
