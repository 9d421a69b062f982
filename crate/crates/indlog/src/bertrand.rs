//! Bertrand's chord problem, computed exactly.
//!
//! Three classical sampling schemes for "a random chord" of the unit
//! circle give three different probabilities that the chord beats the
//! side of the inscribed equilateral triangle. All three are derived here
//! from one geometric fact, the midpoint criterion: a chord is longer
//! than the side iff its midpoint lies strictly inside the half-radius
//! disk. Verdicts on individual chords are decided in rational arithmetic
//! on squared lengths; special angles enter only through polynomial
//! identities that certify their exact cosines. A Monte Carlo sampler
//! cross-checks the exact values, and a discretized rotation check
//! demonstrates that all three schemes — and in fact a distribution for
//! any target probability — spread the chord's midpoint rotation-
//! invariantly.

use rayon::prelude::*;

use crate::rat::Rat;

/// How "a random chord" is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordScheme {
    /// Two independent uniform angles on the circle.
    Endpoints,
    /// A uniform angle for the supporting radius plus a uniform midpoint
    /// distance along it.
    Radius,
    /// A uniform midpoint in the disk.
    Midpoint,
}

impl ChordScheme {
    pub const ALL: [ChordScheme; 3] = [
        ChordScheme::Endpoints,
        ChordScheme::Radius,
        ChordScheme::Midpoint,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ChordScheme::Endpoints => "endpoints",
            ChordScheme::Radius => "radius",
            ChordScheme::Midpoint => "midpoint",
        }
    }
}

impl std::str::FromStr for ChordScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "endpoints" => Ok(ChordScheme::Endpoints),
            "radius" => Ok(ChordScheme::Radius),
            "midpoint" => Ok(ChordScheme::Midpoint),
            other => Err(format!(
                "unknown scheme {other:?}; expected endpoints, radius, or midpoint"
            )),
        }
    }
}

impl std::fmt::Display for ChordScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

// ---------------------------------------------------------------------------
// exact chords

/// A chord of the unit circle with rational data: its midpoint and its
/// squared length. For genuine chords these are tied by the identity
/// len² = 4·(1 − |midpoint|²), which holds by construction for both
/// constructors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chord {
    mid: (Rat, Rat),
    len_sq: Rat,
}

impl Chord {
    /// Chord through two points given exactly on the unit circle.
    pub fn from_endpoints(a: (Rat, Rat), b: (Rat, Rat)) -> Result<Chord, String> {
        for (x, y) in [&a, &b] {
            if &(x * x) + &(y * y) != Rat::one() {
                return Err(format!("({x}, {y}) is not on the unit circle"));
            }
        }
        let two = Rat::int(2);
        let mid = (&(&a.0 + &b.0) / &two, &(&a.1 + &b.1) / &two);
        let (dx, dy) = (&a.0 - &b.0, &a.1 - &b.1);
        Ok(Chord {
            mid,
            len_sq: &(&dx * &dx) + &(&dy * &dy),
        })
    }

    /// Chord whose midpoint is the given point of the closed unit disk.
    pub fn from_midpoint(mid: (Rat, Rat)) -> Result<Chord, String> {
        let r_sq = &(&mid.0 * &mid.0) + &(&mid.1 * &mid.1);
        if r_sq > Rat::one() {
            return Err(format!(
                "({}, {}) lies outside the disk and is no chord midpoint",
                mid.0, mid.1
            ));
        }
        let len_sq = &Rat::int(4) * &(&Rat::one() - &r_sq);
        Ok(Chord { mid, len_sq })
    }

    pub fn midpoint(&self) -> &(Rat, Rat) {
        &self.mid
    }

    pub fn midpoint_radius_sq(&self) -> Rat {
        &(&self.mid.0 * &self.mid.0) + &(&self.mid.1 * &self.mid.1)
    }

    pub fn length_sq(&self) -> &Rat {
        &self.len_sq
    }
}

/// Whether the chord is strictly longer than the side of the inscribed
/// equilateral triangle. Decided on squared lengths: len² > side² = 3,
/// equivalently midpoint radius < 1/2. Strict, so a chord of length
/// exactly √3 does not count. Errors on a degenerate (zero-length) chord.
pub fn longer_than_side(chord: &Chord) -> Result<bool, String> {
    if chord.len_sq == Rat::zero() {
        return Err("degenerate chord of zero length".into());
    }
    Ok(chord.len_sq > inscribed_side_sq())
}

/// Squared side length of the equilateral triangle inscribed in the unit
/// circle: side² = |v₀ − v₁|² = 2 − 2·cos(2π/3) = 3, using the certified
/// cosine below.
pub fn inscribed_side_sq() -> Rat {
    let two = Rat::int(2);
    &two - &(&two * &cos_third_turn())
}

/// cos(2π/3) = −1/2, by the double-angle formula from [`cos_sixth_turn`].
fn cos_third_turn() -> Rat {
    let c = cos_sixth_turn();
    &(&Rat::int(2) * &(&c * &c)) - &Rat::one()
}

/// cos(π/3) = 1/2. Certified: the triple-angle identity demands
/// 4c³ − 3c = cos(π) = −1, and 1/2 is the unique root of 4c³ − 3c + 1
/// in the open interval (0, 1).
fn cos_sixth_turn() -> Rat {
    let c = Rat::new(1, 2);
    let c3 = &(&c * &c) * &c;
    assert_eq!(
        &(&Rat::int(4) * &c3) - &(&Rat::int(3) * &c),
        Rat::int(-1),
        "triple-angle certificate for cos(pi/3)"
    );
    c
}

// ---------------------------------------------------------------------------
// exact scheme probabilities

/// Gap fractions (in turns) between the two endpoints for which the
/// chord's midpoint falls strictly inside the half-radius disk. With the
/// gap at u turns, the midpoint radius is |cos(πu)|; it crosses 1/2
/// exactly where cos(πu) = ±1/2, i.e. at u = 1/3 and u = 2/3.
fn endpoint_gap_interval() -> (Rat, Rat) {
    // r(1/3)² = cos²(π/3) = (1/2)², and by symmetry r(2/3) = r(1/3)
    let r = cos_sixth_turn();
    assert_eq!(&r * &r, Rat::new(1, 4), "half-radius crossing");
    (Rat::new(1, 3), Rat::new(2, 3))
}

/// The probability for each scheme, derived from the midpoint criterion.
pub fn bertrand_exact(scheme: ChordScheme) -> Rat {
    // midpoint radius cutoff of the criterion
    let cutoff = Rat::new(1, 2);
    match scheme {
        // angular-gap measure: one endpoint is fixed by rotation
        // invariance, the gap to the other is uniform in turns, and the
        // midpoint is close enough exactly on the middle gap interval
        ChordScheme::Endpoints => {
            let (lo, hi) = endpoint_gap_interval();
            &hi - &lo
        }
        // the midpoint distance is uniform on [0, 1]; favorable below the
        // cutoff
        ChordScheme::Radius => cutoff,
        // uniform in the disk: the half-radius disk takes the squared
        // share of the area
        ChordScheme::Midpoint => &cutoff * &cutoff,
    }
}

/// Independent derivation for the endpoints scheme: fix one endpoint at a
/// vertex of the inscribed triangle; the chord beats the side exactly
/// when the other endpoint lands strictly inside the far arc between the
/// two remaining vertices, which spans a third of the circle (vertices
/// sit at turns 0, 1/3, 2/3; the certificate is side² = 3).
pub fn endpoints_arc_probability() -> Rat {
    assert_eq!(inscribed_side_sq(), Rat::int(3));
    &Rat::new(2, 3) - &Rat::new(1, 3)
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Result of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McEstimate {
    pub samples: u64,
    pub hits: u64,
    /// hits / samples.
    pub estimate: Rat,
    pub seed: u64,
}

/// SplitMix64 step: add the 64-bit golden-ratio constant, then scramble
/// with two xor-multiply rounds (Steele–Lea–Flood). Fixed here so that
/// estimates are bit-reproducible across platforms and thread counts.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in [0, 1) from the top 53 bits.
fn unit_f64(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Chunk k draws from its own SplitMix64 stream, seeded by scrambling the
/// master seed xor k times an odd constant; merging is a plain sum, so
/// the result does not depend on scheduling.
fn chunk_state(seed: u64, chunk: u64) -> u64 {
    let mut s = seed ^ chunk.wrapping_mul(0xd1b5_4a32_d192_ed03);
    splitmix64(&mut s)
}

const MC_CHUNK: u64 = 1 << 16;

fn mc_chunk_hits(scheme: ChordScheme, seed: u64, chunk: u64, len: u64) -> u64 {
    let mut state = chunk_state(seed, chunk);
    let side_sq = 3.0;
    let mut hits = 0u64;
    for _ in 0..len {
        // squared chord length, from the sampled parameters
        let len_sq = match scheme {
            ChordScheme::Endpoints => {
                let gap = std::f64::consts::TAU * (unit_f64(&mut state) - unit_f64(&mut state));
                2.0 - 2.0 * gap.cos()
            }
            ChordScheme::Radius => {
                let _angle = unit_f64(&mut state);
                let r = unit_f64(&mut state);
                4.0 * (1.0 - r * r)
            }
            ChordScheme::Midpoint => loop {
                let x = 2.0 * unit_f64(&mut state) - 1.0;
                let y = 2.0 * unit_f64(&mut state) - 1.0;
                let r_sq = x * x + y * y;
                if r_sq <= 1.0 {
                    break 4.0 * (1.0 - r_sq);
                }
            },
        };
        if len_sq > side_sq {
            hits += 1;
        }
    }
    hits
}

/// Samples `n` chords under the scheme and counts how many beat the
/// triangle side. Reproducible: the same seed gives the same estimate
/// regardless of thread count.
pub fn bertrand_mc(scheme: ChordScheme, n: u64, seed: u64) -> Result<McEstimate, String> {
    if n == 0 {
        return Err("sample count must be at least 1".into());
    }
    if n > i64::MAX as u64 {
        return Err("sample count too large".into());
    }
    let chunks: Vec<(u64, u64)> = (0..n.div_ceil(MC_CHUNK))
        .map(|i| (i, MC_CHUNK.min(n - i * MC_CHUNK)))
        .collect();
    let hits: u64 = chunks
        .par_iter()
        .map(|&(i, len)| mc_chunk_hits(scheme, seed, i, len))
        .sum();
    Ok(McEstimate {
        samples: n,
        hits,
        estimate: Rat::new(hits as i64, n as i64),
        seed,
    })
}

// ---------------------------------------------------------------------------
// rotation invariance

/// Where a radial band of the discretization sits relative to the
/// half-radius criterion disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BandSide {
    Inside,
    Outside,
    Straddling,
}

/// The chord-midpoint distribution discretized onto k angular sectors ×
/// k radial bands, with exact rational cell masses.
#[derive(Debug, Clone)]
pub struct MidpointGrid {
    k: usize,
    /// cells[s][j]: mass of angular sector s, radial band j.
    cells: Vec<Vec<Rat>>,
    sides: Vec<BandSide>,
}

/// Bands as equal radius shells [j/k, (j+1)/k); the half-radius boundary
/// is a shell edge exactly when k is even.
fn shell_sides(k: usize) -> Vec<BandSide> {
    (0..k)
        .map(|j| {
            if 2 * (j + 1) <= k {
                BandSide::Inside
            } else if 2 * j >= k {
                BandSide::Outside
            } else {
                BandSide::Straddling
            }
        })
        .collect()
}

fn spread_uniformly(k: usize, radial: &[Rat]) -> Vec<Vec<Rat>> {
    let k_rat = Rat::int(k as i64);
    (0..k)
        .map(|_| radial.iter().map(|m| m / &k_rat).collect())
        .collect()
}

impl MidpointGrid {
    /// The discretized midpoint distribution of a built-in scheme.
    ///
    /// All three schemes factor into a uniform angle times a radial law,
    /// so each sector carries mass 1/k. The endpoints scheme is
    /// discretized along the angular gap (uniform by construction), whose
    /// bands map to radius intervals through |cos(π·gap)|.
    pub fn for_scheme(scheme: ChordScheme, k: usize) -> Result<MidpointGrid, String> {
        if k < 2 {
            return Err("need at least two sectors".into());
        }
        let k_rat = Rat::int(k as i64);
        match scheme {
            ChordScheme::Midpoint => {
                // shell area share: ((j+1)² − j²) / k²
                let radial: Vec<Rat> = (0..k)
                    .map(|j| {
                        let hi = Rat::int((j + 1) as i64);
                        let lo = Rat::int(j as i64);
                        &(&(&hi * &hi) - &(&lo * &lo)) / &(&k_rat * &k_rat)
                    })
                    .collect();
                Ok(MidpointGrid {
                    k,
                    cells: spread_uniformly(k, &radial),
                    sides: shell_sides(k),
                })
            }
            ChordScheme::Radius => {
                let radial: Vec<Rat> = (0..k).map(|_| Rat::new(1, k as i64)).collect();
                Ok(MidpointGrid {
                    k,
                    cells: spread_uniformly(k, &radial),
                    sides: shell_sides(k),
                })
            }
            ChordScheme::Endpoints => {
                // gap bands [j/k, (j+1)/k) in turns, mass 1/k each; the
                // criterion region is the gap interval from the midpoint
                // analysis
                let (lo, hi) = endpoint_gap_interval();
                let radial: Vec<Rat> = (0..k).map(|_| Rat::new(1, k as i64)).collect();
                let sides = (0..k)
                    .map(|j| {
                        let b_lo = Rat::new(j as i64, k as i64);
                        let b_hi = Rat::new((j + 1) as i64, k as i64);
                        if b_lo >= lo && b_hi <= hi {
                            BandSide::Inside
                        } else if b_hi <= lo || b_lo >= hi {
                            BandSide::Outside
                        } else {
                            BandSide::Straddling
                        }
                    })
                    .collect();
                Ok(MidpointGrid {
                    k,
                    cells: spread_uniformly(k, &radial),
                    sides,
                })
            }
        }
    }

    /// A user radial law on equal shells, spread uniformly over sectors —
    /// rotation-invariant whatever masses are supplied.
    pub fn from_radial_masses(radial: Vec<Rat>) -> Result<MidpointGrid, String> {
        let k = radial.len();
        if k < 2 {
            return Err("need at least two shells".into());
        }
        let mut total = Rat::zero();
        for m in &radial {
            if m < &Rat::zero() {
                return Err("shell masses must be nonnegative".into());
            }
            total = &total + m;
        }
        if total != Rat::one() {
            return Err(format!("shell masses sum to {total}, not 1"));
        }
        Ok(MidpointGrid {
            k,
            cells: spread_uniformly(k, &radial),
            sides: shell_sides(k),
        })
    }

    /// Arbitrary cell masses (k×k, nonnegative, total 1) — the general
    /// form the rotation check actually scrutinizes.
    pub fn from_cells(cells: Vec<Vec<Rat>>) -> Result<MidpointGrid, String> {
        let k = cells.len();
        if k < 2 || cells.iter().any(|row| row.len() != k) {
            return Err("cells must form a k x k grid with k >= 2".into());
        }
        let mut total = Rat::zero();
        for m in cells.iter().flatten() {
            if m < &Rat::zero() {
                return Err("cell masses must be nonnegative".into());
            }
            total = &total + m;
        }
        if total != Rat::one() {
            return Err(format!("cell masses sum to {total}, not 1"));
        }
        Ok(MidpointGrid {
            k,
            cells,
            sides: shell_sides(k),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Checks every rotation by a multiple of 2π/k against the grid.
    pub fn check(&self) -> RotationReport {
        let k = self.k;
        let mut invariant = true;
        for t in 1..k {
            for s in 0..k {
                if self.cells[s] != self.cells[(s + t) % k] {
                    invariant = false;
                }
            }
        }
        let sector_masses: Vec<Rat> = self
            .cells
            .iter()
            .map(|row| row.iter().fold(Rat::zero(), |a, m| &a + m))
            .collect();
        // criterion mass, exact only when no band with mass straddles the
        // half-radius boundary
        let mut p = Some(Rat::zero());
        for (j, side) in self.sides.iter().enumerate() {
            let band_mass = self
                .cells
                .iter()
                .fold(Rat::zero(), |a, row| &a + &row[j]);
            match side {
                BandSide::Inside => p = p.map(|q| &q + &band_mass),
                BandSide::Outside => {}
                BandSide::Straddling => {
                    if band_mass != Rat::zero() {
                        p = None;
                    }
                }
            }
        }
        RotationReport {
            k,
            rotations_checked: k - 1,
            invariant,
            sector_masses,
            p_below_half: p,
        }
    }
}

/// Result of the discretized rotation-invariance demonstration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationReport {
    pub k: usize,
    pub rotations_checked: usize,
    /// Whether every rotation by 2π/k maps the grid to itself exactly.
    pub invariant: bool,
    pub sector_masses: Vec<Rat>,
    /// Exact mass of the criterion region (midpoint radius < 1/2), when
    /// the band edges let it be read off the grid.
    pub p_below_half: Option<Rat>,
}

/// Discretizes the scheme's midpoint distribution on a k×k polar grid and
/// checks exact invariance under all rotations by multiples of 2π/k.
pub fn rotation_invariance_check(scheme: ChordScheme, k: usize) -> Result<RotationReport, String> {
    Ok(MidpointGrid::for_scheme(scheme, k)?.check())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values_match_the_three_classical_answers() {
        assert_eq!(bertrand_exact(ChordScheme::Endpoints), Rat::new(1, 3));
        assert_eq!(bertrand_exact(ChordScheme::Radius), Rat::new(1, 2));
        assert_eq!(bertrand_exact(ChordScheme::Midpoint), Rat::new(1, 4));
    }

    #[test]
    fn the_two_endpoint_derivations_agree() {
        assert_eq!(
            bertrand_exact(ChordScheme::Endpoints),
            endpoints_arc_probability()
        );
    }

    #[test]
    fn longer_than_side_follows_the_midpoint_criterion() {
        // a diameter: midpoint at the center
        let diameter = Chord::from_midpoint((Rat::zero(), Rat::zero())).unwrap();
        assert!(longer_than_side(&diameter).unwrap());

        // midpoint radius 3/5 = 0.6: length² = 4·(1 − 9/25) = 64/25 < 3
        let short = Chord::from_midpoint((Rat::new(3, 5), Rat::zero())).unwrap();
        assert_eq!(short.length_sq(), &Rat::new(64, 25));
        assert!(!longer_than_side(&short).unwrap());

        // boundary: midpoint radius exactly 1/2 means length √3, excluded
        let boundary = Chord::from_midpoint((Rat::new(1, 2), Rat::zero())).unwrap();
        assert_eq!(boundary.length_sq(), &Rat::int(3));
        assert!(!longer_than_side(&boundary).unwrap());

        // degenerate: midpoint on the circle
        let degenerate = Chord::from_midpoint((Rat::one(), Rat::zero())).unwrap();
        assert!(longer_than_side(&degenerate).is_err());

        // not a midpoint at all
        assert!(Chord::from_midpoint((Rat::int(2), Rat::zero())).is_err());
    }

    /// Rational point on the unit circle via the tangent half-angle map.
    fn circle_point(t: &Rat) -> (Rat, Rat) {
        let t_sq = t * t;
        let den = &Rat::one() + &t_sq;
        ((&(&Rat::one() - &t_sq) / &den), &(&Rat::int(2) * t) / &den)
    }

    struct IntStream(u64);

    impl IntStream {
        fn next(&mut self, m: i64) -> i64 {
            (splitmix64(&mut self.0) % m as u64) as i64
        }

        fn rat(&mut self) -> Rat {
            Rat::new(self.next(41) - 20, self.next(9) + 1)
        }
    }

    #[test]
    fn sampled_chords_tie_length_and_midpoint_exactly() {
        let quarter = Rat::new(1, 4);
        let four = Rat::int(4);
        let mut stream = IntStream(7);
        let mut checked = 0usize;
        while checked < 10_000 {
            // one chord per scheme per round, all with rational parameters
            let a = circle_point(&stream.rat());
            let b = circle_point(&stream.rat());
            let endpoints = Chord::from_endpoints(a, b).unwrap();

            let dir = circle_point(&stream.rat());
            let r = Rat::new(stream.next(100), 100);
            let radius =
                Chord::from_midpoint((&dir.0 * &r, &dir.1 * &r)).unwrap();

            let midpoint = loop {
                let x = Rat::new(stream.next(199) - 99, 100);
                let y = Rat::new(stream.next(199) - 99, 100);
                if let Ok(c) = Chord::from_midpoint((x, y)) {
                    break c;
                }
            };

            for chord in [endpoints, radius, midpoint] {
                // the exact identity tying the two formulations
                let r_sq = chord.midpoint_radius_sq();
                assert_eq!(
                    &chord.len_sq + &(&four * &r_sq),
                    four,
                    "len²+4r² must be 4"
                );
                if chord.len_sq == Rat::zero() {
                    continue;
                }
                assert_eq!(
                    longer_than_side(&chord).unwrap(),
                    r_sq < quarter,
                    "midpoint criterion mismatch"
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_sane() {
        let a = bertrand_mc(ChordScheme::Midpoint, 10_000, 42).unwrap();
        let b = bertrand_mc(ChordScheme::Midpoint, 10_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, 10_000);
        assert_eq!(a.estimate, Rat::new(a.hits as i64, 10_000));

        let one = bertrand_mc(ChordScheme::Radius, 1, 5).unwrap();
        assert!(one.estimate == Rat::zero() || one.estimate == Rat::one());

        assert!(bertrand_mc(ChordScheme::Radius, 0, 5).is_err());
    }

    #[test]
    fn monte_carlo_lands_near_the_exact_values() {
        let n = 200_000u64;
        for scheme in ChordScheme::ALL {
            let exact = bertrand_exact(scheme);
            let p = rat_to_f64(&exact);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            for seed in 0..3u64 {
                let est = bertrand_mc(scheme, n, seed).unwrap();
                let e = est.hits as f64 / n as f64;
                assert!(
                    (e - p).abs() <= 4.0 * sigma,
                    "{scheme}: {e} vs {p} (seed {seed})"
                );
            }
        }
    }

    fn rat_to_f64(r: &Rat) -> f64 {
        // small denominators only, fine for test tolerances
        let s = r.to_string();
        match s.split_once('/') {
            Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
            None => s.parse().unwrap(),
        }
    }

    #[test]
    fn all_schemes_pass_rotation_invariance_for_small_grids() {
        for scheme in ChordScheme::ALL {
            for k in 2..=36 {
                let report = rotation_invariance_check(scheme, k).unwrap();
                assert!(report.invariant, "{scheme} at k={k}");
                assert_eq!(report.rotations_checked, k - 1);
                let per_sector = Rat::new(1, k as i64);
                assert!(report.sector_masses.iter().all(|m| m == &per_sector));
            }
        }
    }

    #[test]
    fn aligned_grids_read_off_the_exact_probabilities() {
        let midpoint = rotation_invariance_check(ChordScheme::Midpoint, 8).unwrap();
        assert_eq!(midpoint.p_below_half, Some(Rat::new(1, 4)));

        let radius = rotation_invariance_check(ChordScheme::Radius, 8).unwrap();
        assert_eq!(radius.p_below_half, Some(Rat::new(1, 2)));

        // gap bands align with the criterion interval when 3 | k
        let endpoints = rotation_invariance_check(ChordScheme::Endpoints, 12).unwrap();
        assert_eq!(endpoints.p_below_half, Some(Rat::new(1, 3)));
        let misaligned = rotation_invariance_check(ChordScheme::Endpoints, 8).unwrap();
        assert_eq!(misaligned.p_below_half, None);

        // odd shell counts straddle the half-radius edge
        let odd = rotation_invariance_check(ChordScheme::Midpoint, 5).unwrap();
        assert_eq!(odd.p_below_half, None);
    }

    #[test]
    fn a_concentrated_radial_law_hits_probability_one_and_stays_invariant() {
        let mut radial = vec![Rat::zero(); 8];
        radial[0] = Rat::new(1, 2);
        radial[1] = Rat::new(1, 2);
        let grid = MidpointGrid::from_radial_masses(radial).unwrap();
        let report = grid.check();
        assert!(report.invariant);
        assert_eq!(report.p_below_half, Some(Rat::one()));
    }

    #[test]
    fn a_lopsided_grid_fails_the_rotation_check() {
        let k = 4;
        let mut cells = vec![vec![Rat::zero(); k]; k];
        cells[0][0] = Rat::one(); // all mass in one sector
        let grid = MidpointGrid::from_cells(cells).unwrap();
        let report = grid.check();
        assert!(!report.invariant);
        assert_eq!(report.p_below_half, Some(Rat::one()));
    }

    #[test]
    fn grid_constructors_validate_their_input() {
        assert!(MidpointGrid::from_radial_masses(vec![Rat::one()]).is_err());
        assert!(MidpointGrid::from_radial_masses(vec![Rat::new(1, 2); 3]).is_err());
        assert!(MidpointGrid::from_cells(vec![vec![Rat::one()]]).is_err());
        assert!(rotation_invariance_check(ChordScheme::Midpoint, 1).is_err());
        assert!(Chord::from_endpoints(
            (Rat::zero(), Rat::zero()),
            (Rat::one(), Rat::zero())
        )
        .is_err());
    }
}
