//! Embedded high-precision constants.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};

use crate::decimal::parse_rational;
use crate::error::{Error, Result};
use crate::real::Ball;

/// 2π to 310 significant digits, correctly rounded.
pub const TWO_PI_DIGITS: &str = "6.283185307179586476925286766559005768394338798750211641949889184615632812572417997256069650684234135964296173026564613294187689219101164463450718816256962234900568205403877042211119289245897909860763928857621951331866892256951296467573566330542403818291297133846920697220908653296426787214520498282547449174013";

/// A real constant given by a decimal string. When `exact` is false the
/// string is a truncation and the true value lies within one unit in the last
/// place of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighPrecisionConstant {
    pub name: String,
    pub digits: String,
    pub source_note: String,
    pub exact: bool,
    value: BigRational,
    ulp: BigRational,
}

impl HighPrecisionConstant {
    pub fn new(name: &str, digits: &str, source_note: &str, exact: bool) -> Result<Self> {
        let value = parse_rational(digits)?;
        let frac = digits.split_once('.').map_or(0, |(_, f)| f.len());
        let ulp = BigRational::new(BigInt::one(), Pow::pow(BigInt::from(10u32), frac as u32));
        Ok(HighPrecisionConstant {
            name: name.to_string(),
            digits: digits.to_string(),
            source_note: source_note.to_string(),
            exact,
            value,
            ulp,
        })
    }

    /// An exactly represented value such as `"1.5"` or `"7"`.
    pub fn exact(name: &str, digits: &str) -> Result<Self> {
        Self::new(name, digits, "exact decimal", true)
    }

    pub fn two_pi() -> Self {
        let c = Self::new(
            "two_pi",
            TWO_PI_DIGITS,
            "mpmath, 320 working digits, rounded to 310",
            false,
        )
        .expect("embedded digits parse");
        c.verify_against(core::f64::consts::TAU, 15)
            .expect("embedded 2pi digits are corrupt");
        c
    }

    /// Checks the leading digits against an independently known double.
    pub fn verify_against(&self, reference: f64, places: i32) -> Result<()> {
        let v = self.value.to_f64().unwrap_or(f64::NAN);
        if (v - reference).abs() < libm::pow(10.0, -(places as f64)) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(self.name.clone()))
        }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    /// Width of the uncertainty on either side (zero when exact).
    pub fn uncertainty(&self) -> BigRational {
        if self.exact {
            BigRational::from_integer(BigInt::from(0))
        } else {
            self.ulp.clone()
        }
    }

    pub fn significant_digits(&self) -> usize {
        self.digits
            .trim_start_matches(['-', '+', '0', '.'])
            .chars()
            .filter(|c| c.is_ascii_digit())
            .count()
    }

    /// Ball at `prec` bits enclosing every value consistent with the digits.
    pub fn ball(&self, prec: u32) -> Ball {
        let u = self.uncertainty();
        Ball::from_bounds(&(&self.value - &u), &(&self.value + &u), prec)
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }
}
