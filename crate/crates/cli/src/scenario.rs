//! JSON scenario files: a base dimension, bimodules, operators tagged with a
//! side and a family, and suite parameters.

use bifree::base_algebra::{AOperator, Bimodule, QMatrix};
use bifree::bnc_core::Side;
use bifree::moment_cumulant::FamilyGens;
use bifree::operator_model::{FpOp, FreeProduct};
use bifree::suites::SuiteParams;
use bifree::scalar::parse_q;
use bifree::Q;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};
use std::sync::Arc;

/// A rational entry, written as "p/q" or a plain integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Entry(pub String);

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Int(i) => Entry(i.to_string()),
            Raw::Text(s) => Entry(s),
        })
    }
}

pub type Matrix = Vec<Vec<Entry>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BimoduleSpec {
    /// φ(b) = I_m ⊗ b.
    Central { m: usize },
    /// φ(b) = S(I_m ⊗ b)S⁻¹ for an invertible md×md matrix S.
    Conjugated { m: usize, s: Matrix },
    /// A random conjugated bimodule drawn from `seed`.
    Random { m: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomOp {
    pub range: i64,
    pub seed: u64,
}

/// Exactly one of `matrix` and `random` is given. A left operator's matrix
/// is the (1+m)d-square A acting by X ↦ AX; a right operator's matrix holds
/// the blocks c_{ji} of Y_i ↦ Σ_j Y_j c_{ji}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub family: usize,
    pub bimodule: usize,
    pub side: Side,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomOp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub b_dim: usize,
    #[serde(default)]
    pub bimodules: Vec<BimoduleSpec>,
    #[serde(default)]
    pub operators: Vec<OperatorSpec>,
    #[serde(default)]
    pub params: SuiteParams,
}

/// The scenario's operators lifted into the free product of its bimodules.
pub struct Realized {
    pub space: Arc<FreeProduct>,
    pub families: Vec<FamilyGens<FreeProduct>>,
    /// Every operator in file order with its side.
    pub ops: Vec<(Side, FpOp)>,
}

fn matrix(m: &Matrix, at: &str) -> Result<QMatrix, String> {
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| {
                    parse_q(&e.0).map_err(|_| format!("{at}[{i}][{j}]: `{}` is not a rational number", e.0))
                })
                .collect::<Result<Vec<Q>, String>>()
        })
        .collect::<Result<Vec<_>, String>>()?;
    QMatrix::from_rows(rows).map_err(|e| format!("{at}: {e}"))
}

impl Scenario {
    /// Parses and validates; `origin` prefixes every message.
    pub fn parse(text: &str, origin: &str) -> Result<Self, String> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| format!("{origin}:{}:{}: {e}", e.line(), e.column()))?;
        s.realize(1).map_err(|e| format!("{origin}: {e}"))?;
        Ok(s)
    }

    pub fn to_canonical(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("scenarios serialize");
        out.push('\n');
        out
    }

    pub fn bimodule(&self, i: usize) -> Result<Bimodule, String> {
        let d = self.b_dim;
        let at = format!("bimodules[{i}]");
        match &self.bimodules[i] {
            BimoduleSpec::Central { m } => Ok(Bimodule::central(d, *m)),
            BimoduleSpec::Conjugated { m, s } => {
                Bimodule::conjugated(d, *m, &matrix(s, &format!("{at}.s"))?).map_err(|e| format!("{at}: {e}"))
            }
            BimoduleSpec::Random { m, seed } => Ok(Bimodule::random(d, *m, &mut ChaCha8Rng::seed_from_u64(*seed))),
        }
    }

    fn operator(&self, i: usize, x: &Bimodule) -> Result<AOperator, String> {
        let spec = &self.operators[i];
        let at = format!("operators[{i}]");
        let op = match (&spec.matrix, &spec.random) {
            (Some(m), None) => {
                let a = matrix(m, &format!("{at}.matrix"))?;
                match spec.side {
                    Side::Left => x.left_operator_from(&a),
                    Side::Right => x.right_operator_from(&a),
                }
                .map_err(|e| format!("{at}.matrix: {e}"))?
            }
            (None, Some(r)) => {
                if r.range <= 0 {
                    return Err(format!("{at}.random.range: must be positive"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
                match spec.side {
                    Side::Left => x.random_left_operator(r.range, &mut rng),
                    Side::Right => x.random_right_operator(r.range, &mut rng),
                }
            }
            _ => return Err(format!("{at}: give exactly one of `matrix` and `random`")),
        };
        let ok = match spec.side {
            Side::Left => x.is_left_operator(&op),
            Side::Right => x.is_right_operator(&op),
        };
        if !ok {
            return Err(format!("{at}: not a {} operator on bimodules[{}]", spec.side.name(), spec.bimodule));
        }
        Ok(op)
    }

    /// Builds the free product of the bimodules at `depth` and lifts every
    /// operator onto its component.
    pub fn realize(&self, depth: usize) -> Result<Realized, String> {
        if self.b_dim == 0 {
            return Err("b_dim: must be positive".into());
        }
        if self.bimodules.is_empty() {
            return Err("bimodules: at least one is required".into());
        }
        let comps = (0..self.bimodules.len()).map(|i| self.bimodule(i).map(Arc::new)).collect::<Result<Vec<_>, _>>()?;
        let fp = Arc::new(FreeProduct::new(comps.clone(), depth).map_err(|e| e.to_string())?);
        let n_fam = self.operators.iter().map(|o| o.family + 1).max().unwrap_or(0);
        let mut families: Vec<FamilyGens<FreeProduct>> = (0..n_fam).map(|_| FamilyGens::new(vec![], vec![])).collect();
        let mut homes: Vec<Option<usize>> = vec![None; n_fam];
        let mut ops = vec![];
        for (i, spec) in self.operators.iter().enumerate() {
            let at = format!("operators[{i}]");
            if spec.bimodule >= comps.len() {
                return Err(format!("{at}.bimodule: no bimodule {} (there are {})", spec.bimodule, comps.len()));
            }
            match homes[spec.family] {
                Some(h) if h != spec.bimodule => {
                    return Err(format!("{at}: family {} already lives on bimodules[{h}]", spec.family))
                }
                _ => homes[spec.family] = Some(spec.bimodule),
            }
            let a = self.operator(i, &comps[spec.bimodule])?;
            let lifted = match spec.side {
                Side::Left => fp.lambda(spec.bimodule, &a),
                Side::Right => fp.rho(spec.bimodule, &a),
            }
            .map_err(|e| format!("{at}: {e}"))?;
            match spec.side {
                Side::Left => families[spec.family].left.push(lifted.clone()),
                Side::Right => families[spec.family].right.push(lifted.clone()),
            }
            ops.push((spec.side, lifted));
        }
        if let Some(f) = homes.iter().position(Option::is_none) {
            return Err(format!("operators: family {f} has no operators"));
        }
        Ok(Realized { space: fp, families, ops })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "b_dim": 1,
  "bimodules": [{"kind": "central", "m": 1}],
  "operators": [
    {"family": 0, "bimodule": 0, "side": "left", "matrix": [[1, "1/2"], [0, 2]]}
  ]
}"#;

    #[test]
    fn canonical_round_trip() {
        let s = Scenario::parse(SMALL, "t").unwrap();
        let c = s.to_canonical();
        let again = Scenario::parse(&c, "t").unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_canonical(), c);
    }

    #[test]
    fn errors_carry_locations() {
        let e = Scenario::parse("{\n  \"b_dim\": 1,\n  \"bogus\": 3\n}", "f.json").unwrap_err();
        assert!(e.starts_with("f.json:3:"), "{e}");
        let bad = SMALL.replace("\"1/2\"", "\"x\"");
        let e = Scenario::parse(&bad, "f.json").unwrap_err();
        assert!(e.contains("operators[0].matrix[0][1]"), "{e}");
        let bad = SMALL.replace("\"bimodule\": 0", "\"bimodule\": 4");
        assert!(Scenario::parse(&bad, "f.json").unwrap_err().contains("operators[0].bimodule"));
    }
}
