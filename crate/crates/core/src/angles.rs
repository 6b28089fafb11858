//! Rational angles under the doubling map, their itineraries relative to a
//! chosen angle's diameter, and the kneading data they induce.
//!
//! All arithmetic is exact: angles are reduced fractions with `u64` parts and
//! comparisons cross-multiply in `u128`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::automaton::Letter;
use crate::error::Error;
use crate::kneading::{BitWord, KneadingData, KneadingGroup};

/// A point of the circle ℝ/ℤ, stored as a reduced fraction in [0, 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Angle {
    num: u64,
    den: u64,
}

impl Angle {
    pub fn new(num: u64, den: u64) -> Result<Angle, Error> {
        if den == 0 {
            return Err(Error::Angle("denominator must be nonzero".into()));
        }
        let num = num % den;
        let g = num.gcd(&den);
        Ok(Angle { num: num / g, den: den / g })
    }

    pub fn zero() -> Angle {
        Angle { num: 0, den: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// The image under the doubling map α ↦ 2α.
    pub fn double(&self) -> Angle {
        Angle::new(2 * self.num % self.den, self.den).expect("denominator is nonzero")
    }

    /// Periodic exactly when the reduced denominator is odd.
    pub fn is_periodic(&self) -> bool {
        self.den % 2 == 1
    }

    /// Halving gives the two preimages; this is the one in [0, 1/2).
    fn half(&self) -> Angle {
        Angle::new(self.num, 2 * self.den).expect("denominator is nonzero")
    }

    /// The preimage in [1/2, 1): θ/2 + 1/2.
    fn half_plus(&self) -> Angle {
        Angle::new(self.num + self.den, 2 * self.den).expect("denominator is nonzero")
    }

    fn cmp_exact(&self, other: &Angle) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Angle) -> Option<std::cmp::Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Angle) -> std::cmp::Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Angle, Error> {
        let parse_part = |p: &str| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::Angle(format!("cannot parse '{p}' as an integer")))
        };
        match s.split_once('/') {
            Some((num, den)) => Angle::new(parse_part(num)?, parse_part(den)?),
            None => Angle::new(parse_part(s)?, 1),
        }
    }
}

/// One symbol of a θ-itinerary; `Star` marks landing on the diameter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ItinerarySymbol {
    Zero,
    One,
    Star,
}

impl ItinerarySymbol {
    pub fn as_letter(&self) -> Option<Letter> {
        match self {
            ItinerarySymbol::Zero => Some(Letter::ZERO),
            ItinerarySymbol::One => Some(Letter::ONE),
            ItinerarySymbol::Star => None,
        }
    }

    pub fn from_letter(l: Letter) -> ItinerarySymbol {
        if l == Letter::ONE {
            ItinerarySymbol::One
        } else {
            ItinerarySymbol::Zero
        }
    }
}

impl fmt::Display for ItinerarySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            ItinerarySymbol::Zero => '0',
            ItinerarySymbol::One => '1',
            ItinerarySymbol::Star => '*',
        };
        write!(f, "{c}")
    }
}

/// Which of the two open arcs cut out by {θ/2, θ/2 + 1/2} carries the
/// symbol 1. The default puts 1 on the arc containing θ itself, so that
/// kneading sequences start with 1; the alternative is the transposed
/// labeling.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ArcLabeling {
    #[default]
    ThetaArcOne,
    ThetaArcZero,
}

/// The orbit of θ under doubling: pre-period entries followed by one full
/// cycle, with the minimal pre-period and period.
pub fn doubling_orbit(theta: Angle) -> (Vec<Angle>, usize, usize) {
    let preperiod = theta.den.trailing_zeros() as usize;
    let mut orbit = vec![theta];
    let mut current = theta;
    loop {
        current = current.double();
        if orbit.len() > preperiod && current == orbit[preperiod] {
            break;
        }
        orbit.push(current);
    }
    let period = orbit.len() - preperiod;
    (orbit, preperiod, period)
}

/// The θ-itinerary of α: for each power of the doubling map, on which side
/// of the diameter through θ/2 and θ/2 + 1/2 the point lies.
pub fn itinerary(theta: Angle, alpha: Angle, length: usize) -> Vec<ItinerarySymbol> {
    itinerary_labeled(theta, alpha, length, ArcLabeling::default())
}

pub fn itinerary_labeled(
    theta: Angle,
    alpha: Angle,
    length: usize,
    labeling: ArcLabeling,
) -> Vec<ItinerarySymbol> {
    let mut out = Vec::with_capacity(length);
    let mut current = alpha;
    for _ in 0..length {
        out.push(symbol_of(theta, current, labeling));
        current = current.double();
    }
    out
}

/// Both boundary points are excluded from both arcs; the lower boundary θ/2
/// sits in [0, 1/2), so the arc containing θ is the plain interval between
/// the halves and its complement wraps through 0.
fn symbol_of(theta: Angle, alpha: Angle, labeling: ArcLabeling) -> ItinerarySymbol {
    let lo = theta.half();
    let hi = theta.half_plus();
    if alpha == lo || alpha == hi {
        return ItinerarySymbol::Star;
    }
    let in_theta_arc = lo < alpha && alpha < hi;
    let one_side = labeling == ArcLabeling::ThetaArcOne;
    if in_theta_arc == one_side {
        ItinerarySymbol::One
    } else {
        ItinerarySymbol::Zero
    }
}

/// An eventually periodic symbol sequence: `pre` then `cycle` forever.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RawItinerary {
    pub pre: Vec<ItinerarySymbol>,
    pub cycle: Vec<ItinerarySymbol>,
}

impl RawItinerary {
    pub fn expand(&self, length: usize) -> Vec<ItinerarySymbol> {
        let mut out = Vec::with_capacity(length);
        for i in 0..length {
            if i < self.pre.len() {
                out.push(self.pre[i]);
            } else {
                out.push(self.cycle[(i - self.pre.len()) % self.cycle.len()]);
            }
        }
        out
    }
}

impl fmt::Display for RawItinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.pre {
            write!(f, "{s}")?;
        }
        write!(f, "(")?;
        for s in &self.cycle {
            write!(f, "{s}")?;
        }
        write!(f, ")^inf")
    }
}

/// The kneading sequence of an angle together with the data leading to it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KneadingResult {
    pub raw: RawItinerary,
    pub canonical: KneadingData,
    pub orbit: Vec<Angle>,
    pub preperiod: usize,
    pub period: usize,
    /// Whether the kneading period properly divides the doubling period; the
    /// canonical form always uses the primitive root.
    pub period_collapsed: bool,
}

/// The kneading sequence: the θ-itinerary of θ itself, in canonical form.
///
/// Periodic θ visits the diameter exactly once per cycle, right before
/// returning to θ, so the cycle reads x_1…x_{n−1}*; the canonical data keeps
/// the letters. Pre-periodic θ never hits the diameter; the canonical pair
/// takes the primitive root of the cycle and strips the pre-period to the
/// last position that differs from the cycle's end.
pub fn kneading_sequence(theta: Angle) -> Result<KneadingResult, Error> {
    let (orbit, preperiod, period) = doubling_orbit(theta);
    let symbols = itinerary(theta, theta, preperiod + period);
    let raw = RawItinerary {
        pre: symbols[..preperiod].to_vec(),
        cycle: symbols[preperiod..].to_vec(),
    };
    if theta.is_periodic() {
        let mut letters = Vec::with_capacity(period - 1);
        for (i, s) in raw.cycle.iter().enumerate() {
            match s.as_letter() {
                Some(l) if i + 1 < period => letters.push(l),
                None if i + 1 == period => {}
                _ => {
                    return Err(Error::Angle(format!(
                        "itinerary of {theta} is not in periodic kneading form"
                    )))
                }
            }
        }
        return Ok(KneadingResult {
            raw,
            canonical: KneadingData::Periodic { v: BitWord::new(letters) },
            orbit,
            preperiod,
            period,
            period_collapsed: false,
        });
    }

    let to_letters = |symbols: &[ItinerarySymbol]| -> Result<Vec<Letter>, Error> {
        symbols
            .iter()
            .map(|s| {
                s.as_letter().ok_or_else(|| {
                    Error::Angle(format!("pre-periodic itinerary of {theta} hits the diameter"))
                })
            })
            .collect()
    };
    let mut pre = to_letters(&raw.pre)?;
    let cycle = to_letters(&raw.cycle)?;
    let root = crate::automaton::primitive_root(&cycle);
    let period_collapsed = root.len() < cycle.len();
    let mut cycle = root.to_vec();
    // Dropping an equal last letter shifts the cycle's phase back by one.
    while let Some(&last) = pre.last() {
        if last != cycle[cycle.len() - 1] {
            break;
        }
        pre.pop();
        cycle.rotate_right(1);
    }
    if pre.is_empty() {
        return Err(Error::Angle(format!(
            "itinerary of {theta} has no pre-periodic part"
        )));
    }
    Ok(KneadingResult {
        raw,
        canonical: KneadingData::Preperiodic { w: BitWord::new(pre), v: BitWord::new(cycle) },
        orbit,
        preperiod,
        period,
        period_collapsed,
    })
}

/// The group attached to the angle's kneading sequence.
pub fn group_from_angle(theta: Angle) -> Result<(KneadingGroup, KneadingResult), Error> {
    let result = kneading_sequence(theta)?;
    let group = result.canonical.group()?;
    Ok((group, result))
}
