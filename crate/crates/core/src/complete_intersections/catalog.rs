//! Named polynomial families.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::parse::parse_system;
use super::poly::{MultiHomogeneousPolynomial, PolySystem, Polynomial};
use super::witness::witness_qa;
use super::{PolyError, Result};

/// Rational stand-in `355/113` for the transcendental coefficient of `p₁`.
pub const PI_SURROGATE: (i64, i64) = (355, 113);

/// A family member, as selected by name and parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Family {
    /// `z₀^d + ⋯ + z_{n−1}^d + z_{n−1} z_n^{d−1}` on `P^n`.
    #[serde(rename = "Xd")]
    Xd { d: u32, n: usize },
    /// `z_{0,0}² p₁ + z_{0,1}² p₂` on `P¹×P¹×P¹`, multidegree `(2, m, n)`.
    #[serde(rename = "X2mn")]
    X2mn { m: u32, n: u32 },
    /// The witness system `q_A` for degrees `d` on `P^n`.
    #[serde(rename = "qA")]
    QA { d: Vec<u32>, n: usize },
    /// A user system in the text grammar.
    #[serde(rename = "custom")]
    Custom { factor_dims: Vec<usize>, text: String },
}

impl Family {
    /// Builds a family from its catalog name and integer parameters.
    /// `qA` takes the degrees followed by `n`. `custom` cannot be built this way.
    pub fn from_name(name: &str, params: &[u32]) -> Result<Self> {
        let need = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(PolyError::BadParams(format!("{name} takes {k} parameters, got {}", params.len())))
            }
        };
        match name {
            "Xd" => {
                need(2)?;
                Ok(Family::Xd { d: params[0], n: params[1] as usize })
            }
            "X2mn" => {
                need(2)?;
                Ok(Family::X2mn { m: params[0], n: params[1] })
            }
            "qA" => {
                if params.len() < 2 {
                    return Err(PolyError::BadParams("qA takes degrees followed by n".into()));
                }
                let (n, d) = params.split_last().expect("non-empty");
                Ok(Family::QA { d: d.to_vec(), n: *n as usize })
            }
            "custom" => Err(PolyError::BadParams("custom families need a polynomial text".into())),
            other => Err(PolyError::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Xd { .. } => "Xd",
            Family::X2mn { .. } => "X2mn",
            Family::QA { .. } => "qA",
            Family::Custom { .. } => "custom",
        }
    }
}

/// A built family member together with any exactness substitutions made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub family: Family,
    pub system: PolySystem,
    pub substitutions: Vec<String>,
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn xd(d: u32, n: usize) -> Result<PolySystem> {
    if d == 0 || n < 2 {
        return Err(PolyError::BadParams(format!("Xd needs d ≥ 1 and n ≥ 2, got d = {d}, n = {n}")));
    }
    let nv = n + 1;
    let z = |i| Polynomial::var(nv, i);
    let mut p = z(n - 1).mul(&z(n).pow(d - 1));
    for i in 0..n {
        p = p.add(&z(i).pow(d));
    }
    PolySystem::single(MultiHomogeneousPolynomial::new(vec![n], p)?)
}

fn x2mn(m: u32, n: u32) -> Result<PolySystem> {
    if m == 0 || n == 0 {
        return Err(PolyError::BadParams(format!("X2mn needs m, n ≥ 1, got m = {m}, n = {n}")));
    }
    // Flat variables: z0_0, z0_1, z1_0, z1_1, z2_0, z2_1.
    let z = |i| Polynomial::var(6, i);
    let (z00, z01, z10, z11, z20, z21) = (z(0), z(1), z(2), z(3), z(4), z(5));
    let pi = BigRational::new(PI_SURROGATE.0.into(), PI_SURROGATE.1.into());
    let mono = |a: &Polynomial, b: &Polynomial| a.pow(m).mul(&b.pow(n));
    let p1 = mono(&z10, &z20)
        .add(&mono(&z11, &z20).scale(&int(2)))
        .add(&mono(&z10, &z21).scale(&int(3)))
        .add(&mono(&z11, &z21).scale(&pi));
    let p2 = mono(&z10, &z20)
        .add(&mono(&z11, &z20))
        .add(&mono(&z10, &z21))
        .add(&z10.mul(&z11.pow(m - 1)).mul(&z21.pow(n)));
    let p = z00.pow(2).mul(&p1).add(&z01.pow(2).mul(&p2));
    PolySystem::single(MultiHomogeneousPolynomial::new(vec![1, 1, 1], p)?)
}

/// Builds the polynomial system of a family member.
pub fn family_catalog(family: &Family) -> Result<CatalogEntry> {
    let mut substitutions = Vec::new();
    let system = match family {
        Family::Xd { d, n } => xd(*d, *n)?,
        Family::X2mn { m, n } => {
            substitutions.push(format!(
                "coefficient pi of z1_1^m*z2_1^n in p1 replaced by {}/{}",
                PI_SURROGATE.0, PI_SURROGATE.1
            ));
            x2mn(*m, *n)?
        }
        Family::QA { d, n } => witness_qa(d, *n)?,
        Family::Custom { factor_dims, text } => parse_system(text, factor_dims)?,
    };
    Ok(CatalogEntry { family: family.clone(), system, substitutions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xd_members() {
        let k3 = family_catalog(&Family::Xd { d: 4, n: 3 }).unwrap();
        assert_eq!(k3.system.to_string(), "z0^4 + z1^4 + z2^4 + z2*z3^3");
        let x2 = family_catalog(&Family::from_name("Xd", &[2, 3]).unwrap()).unwrap();
        assert_eq!(x2.system.to_string(), "z0^2 + z1^2 + z2^2 + z2*z3");
        assert!(k3.substitutions.is_empty());
    }

    #[test]
    fn x2mn_member() {
        let e = family_catalog(&Family::X2mn { m: 2, n: 2 }).unwrap();
        assert_eq!(e.system.polys()[0].multidegree(), &[2, 2, 2]);
        assert_eq!(e.system.polys()[0].poly().num_terms(), 8);
        assert_eq!(e.substitutions.len(), 1);
        let p = e.system.polys()[0].poly();
        assert_eq!(p.coefficient(&[2, 0, 0, 2, 0, 2]), BigRational::new(355.into(), 113.into()));
    }

    #[test]
    fn names() {
        assert_eq!(Family::from_name("qA", &[1, 2, 4]).unwrap(), Family::QA { d: vec![1, 2], n: 4 });
        assert_eq!(Family::from_name("Y", &[]), Err(PolyError::UnknownFamily("Y".into())));
        assert!(Family::from_name("Xd", &[4]).is_err());
    }
}
