//! JSON encodings.
//!
//! * complex number: `[re, im]`
//! * matrix: `{"dim": n, "entries": [[re, im], ...]}`, row-major
//! * algebra: `{"blocks": [n₁, ...]}`
//! * element: `{"algebra": algebra, "parts": [matrix, ...]}`
//! * ideal: `{"support": [k, ...]}`
//! * morphism: `{"kept_blocks": [k, ...], "twists": [matrix | null, ...]}`
//! * system: `{"levels": {id: algebra}, "order": [[α, β], ...], "connectors": {"α<β": morphism}}`
//! * coherent element: `{id: element}`; coherent ideal: `{id: ideal}`
//!
//! Ideals and morphisms do not carry their algebras; decoding them needs the
//! surrounding context. Floats are written in shortest round-trip form and
//! parsed exactly, so `decode(encode(v)) == v` bit for bit.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{reject, Error, Result};
use crate::fdalg::{AlgElement, FdAlgebra};
use crate::ideals::{BlockIdeal, StarMorphism};
use crate::kernel::{CMatrix, C64};
use crate::limit::{CoherentIdeal, DirectedSystem, LevelId};

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            dim: self.dim(),
            entries: self.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        let entries = w.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        CMatrix::new(w.dim, entries).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraWire {
    blocks: Vec<usize>,
}

impl Serialize for FdAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraWire {
            blocks: self.blocks().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FdAlgebra {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = AlgebraWire::deserialize(d)?;
        FdAlgebra::new(w.blocks).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize)]
struct ElementRef<'a> {
    algebra: &'a FdAlgebra,
    parts: &'a [CMatrix],
}

#[derive(Deserialize)]
struct ElementWire {
    algebra: FdAlgebra,
    parts: Vec<CMatrix>,
}

impl Serialize for AlgElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRef {
            algebra: self.algebra(),
            parts: self.parts(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = ElementWire::deserialize(d)?;
        AlgElement::new(w.algebra, w.parts).map_err(serde::de::Error::custom)
    }
}

/// `{"support": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealWire {
    pub support: Vec<usize>,
}

impl BlockIdeal {
    pub fn to_wire(&self) -> IdealWire {
        IdealWire {
            support: self.support().iter().copied().collect(),
        }
    }

    pub fn from_wire(algebra: &FdAlgebra, wire: &IdealWire) -> Result<Self> {
        let support: BTreeSet<usize> = wire.support.iter().copied().collect();
        if support.len() != wire.support.len() {
            return reject("ideal support lists an index twice");
        }
        BlockIdeal::new(algebra.clone(), support)
    }
}

/// `{"kept_blocks": [...], "twists": [matrix | null, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismWire {
    pub kept_blocks: Vec<usize>,
    pub twists: Vec<Option<CMatrix>>,
}

impl StarMorphism {
    pub fn to_wire(&self) -> MorphismWire {
        MorphismWire {
            kept_blocks: self.kept_blocks().to_vec(),
            twists: self.twists().to_vec(),
        }
    }

    pub fn from_wire(source: &FdAlgebra, wire: &MorphismWire) -> Result<Self> {
        StarMorphism::new(
            source.clone(),
            wire.kept_blocks.clone(),
            wire.twists.clone(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct SystemWire {
    levels: BTreeMap<LevelId, FdAlgebra>,
    order: Vec<(LevelId, LevelId)>,
    connectors: BTreeMap<String, MorphismWire>,
}

fn pair_key(a: &LevelId, b: &LevelId) -> String {
    format!("{a}<{b}")
}

fn parse_pair_key(key: &str) -> Result<(LevelId, LevelId)> {
    match key.split_once('<') {
        Some((a, b)) => Ok((LevelId::new(a)?, LevelId::new(b)?)),
        None => reject(format!("connector key {key:?} is not of the form \"a<b\"")),
    }
}

impl Serialize for DirectedSystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemWire {
            levels: self.levels().clone(),
            order: self.strict_pairs().cloned().collect(),
            connectors: self
                .connectors()
                .iter()
                .map(|((a, b), g)| (pair_key(a, b), g.to_wire()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirectedSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SystemWire::deserialize(d)?;
        system_from_wire(w).map_err(serde::de::Error::custom)
    }
}

fn system_from_wire(w: SystemWire) -> Result<DirectedSystem> {
    let mut connectors = BTreeMap::new();
    for (key, mw) in &w.connectors {
        let (a, b) = parse_pair_key(key)?;
        let source = w
            .levels
            .get(&b)
            .ok_or_else(|| Error::Rejected(format!("connector {key} names unknown level {b}")))?;
        connectors.insert((a, b), StarMorphism::from_wire(source, mw)?);
    }
    DirectedSystem::new(w.levels, w.order, connectors)
}

pub type CoherentIdealWire = BTreeMap<LevelId, IdealWire>;

impl CoherentIdeal {
    pub fn to_wire(&self) -> CoherentIdealWire {
        self.supports
            .iter()
            .map(|(k, i)| (k.clone(), i.to_wire()))
            .collect()
    }

    pub fn from_wire(system: &DirectedSystem, wire: &CoherentIdealWire) -> Result<Self> {
        let supports = wire
            .iter()
            .map(|(k, w)| Ok((k.clone(), BlockIdeal::from_wire(system.algebra(k)?, w)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        if supports.len() != system.levels().len() {
            return reject("ideal does not cover the system's levels");
        }
        Ok(CoherentIdeal { supports })
    }
}

/// Pretty-printed, deterministic encoding.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Syntax errors carry the line and column of the offending token; validation
/// errors carry the failed check.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::CoherentElement;
    use crate::random::SampleRng;

    fn roundtrip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) {
        let text = to_json(v).unwrap();
        let back: T = from_json(&text).unwrap();
        assert_eq!(&back, v);
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn matrix_format() {
        let m = CMatrix::from_rows(&[&[C64::new(1.0, -0.5)]]);
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"dim":1,"entries":[[1.0,-0.5]]}"#
        );
    }

    #[test]
    fn element_format() {
        let a = FdAlgebra::new(vec![1]).unwrap();
        assert_eq!(
            serde_json::to_string(&a.unit()).unwrap(),
            r#"{"algebra":{"blocks":[1]},"parts":[{"dim":1,"entries":[[1.0,0.0]]}]}"#
        );
    }

    #[test]
    fn zero_element_roundtrip() {
        roundtrip(&FdAlgebra::new(vec![2, 1, 3]).unwrap().zero());
    }

    #[test]
    fn random_values_roundtrip_bit_exact() {
        let mut rng = SampleRng::new(77);
        let a = FdAlgebra::new(vec![3, 2]).unwrap();
        for _ in 0..20 {
            let x = rng.element(&a).scale(C64::new(1e-7, 3e5));
            roundtrip(&x);
        }
    }

    #[test]
    fn ideal_and_morphism_wire() {
        let a = FdAlgebra::new(vec![2, 2, 1]).unwrap();
        let i = BlockIdeal::new(a.clone(), [0, 2].into_iter().collect()).unwrap();
        assert_eq!(
            serde_json::to_string(&i.to_wire()).unwrap(),
            r#"{"support":[0,2]}"#
        );
        assert_eq!(BlockIdeal::from_wire(&a, &i.to_wire()).unwrap(), i);
        let dup = IdealWire {
            support: vec![1, 1],
        };
        assert!(BlockIdeal::from_wire(&a, &dup).is_err());

        let mut rng = SampleRng::new(3);
        let phi =
            StarMorphism::new(a.clone(), vec![1, 2], vec![Some(rng.unitary(2)), None]).unwrap();
        let text = serde_json::to_string(&phi.to_wire()).unwrap();
        assert!(text.starts_with(r#"{"kept_blocks":[1,2],"twists":[{"dim":2"#));
        assert!(text.ends_with(",null]}"));
        let back: MorphismWire = from_json(&text).unwrap();
        assert_eq!(StarMorphism::from_wire(&a, &back).unwrap(), phi);
    }

    #[test]
    fn system_roundtrip() {
        let top = FdAlgebra::new(vec![2, 1, 2]).unwrap();
        let mut rng = SampleRng::new(5);
        let g1 =
            StarMorphism::new(top.clone(), vec![2, 0], vec![Some(rng.unitary(2)), None]).unwrap();
        let g0 = StarMorphism::selection(g1.target(), vec![1]).unwrap();
        let g01 = g0.compose(&g1).unwrap();
        let (l0, l1, l2) = (
            LevelId::new("L0").unwrap(),
            LevelId::new("L1").unwrap(),
            LevelId::new("L2").unwrap(),
        );
        let levels = [
            (l0.clone(), g0.target().clone()),
            (l1.clone(), g1.target().clone()),
            (l2.clone(), top.clone()),
        ]
        .into_iter()
        .collect();
        let connectors = [
            ((l0.clone(), l1.clone()), g0),
            ((l1.clone(), l2.clone()), g1),
            ((l0.clone(), l2.clone()), g01),
        ]
        .into_iter()
        .collect();
        let s = DirectedSystem::new(
            levels,
            [
                (l0.clone(), l1.clone()),
                (l1.clone(), l2.clone()),
                (l0, l2.clone()),
            ],
            connectors,
        )
        .unwrap();
        roundtrip(&s);

        let x = s.coherent_from_top(&l2, &rng.element(&top)).unwrap();
        roundtrip(&x);
        let ci = CoherentIdeal::from_top(&s, &l2, &rng.ideal(&top)).unwrap();
        let text = to_json(&ci.to_wire()).unwrap();
        let wire: CoherentIdealWire = from_json(&text).unwrap();
        assert_eq!(CoherentIdeal::from_wire(&s, &wire).unwrap(), ci);
        let _: &CoherentElement = &x;
    }

    #[test]
    fn malformed_json_reports_location() {
        let err = from_json::<CMatrix>("{\"dim\": 1,\n \"entries\": [[1.0, 0.0]").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        let err = from_json::<CMatrix>(r#"{"dim": 2, "entries": [[1.0, "x"]]}"#).unwrap_err();
        assert!(err.to_string().contains("column"), "{err}");
        // well-formed but invalid: the validation message comes through
        let err = from_json::<CMatrix>(r#"{"dim": 2, "entries": [[1.0, 0.0]]}"#).unwrap_err();
        assert!(err.to_string().contains("needs 4 entries"), "{err}");
    }

    #[test]
    fn bad_connector_key_rejected() {
        let text = r#"{"levels": {"a": {"blocks": [1]}}, "order": [], "connectors": {"ab": {"kept_blocks": [0], "twists": [null]}}}"#;
        assert!(from_json::<DirectedSystem>(text).is_err());
    }
}
