//! Sampled double-inclusion checks for how a surjection `φ: A → B` acts on
//! positive cones and ideals.
//!
//! Every set equality `L = R` is checked in both directions. Forward: push a
//! sampled member of `L` through and test membership in `R`. Backward: sample
//! a member of `R`, build an explicit preimage, and test that the preimage is
//! a member of the corresponding source set and maps back onto the sample.
//!
//! | law                | equality |
//! |--------------------|-----------|
//! | `image_ideal`      | `φ(I)` is a closed *-ideal of `B` |
//! | `image_cone`       | `φ(A⁺) = B⁺` |
//! | `ideal_cone_image` | `φ(I⁺) = φ(I)⁺` (and for `J`) |
//! | `cone_sum_image`   | `φ(I⁺ + J⁺) = φ(I)⁺ + φ(J)⁺` |
//! | `sum_cone_image`   | `φ((I+J)⁺) = (φ(I) + φ(J))⁺` |
//! | `cone_in_range`    | `φ(A⁺) = B⁺ ∩ φ(A)` |
//! | `subalgebra_cone`  | `S⁺ = A⁺ ∩ S` for `S` the closed *-subalgebra `lift(B) ⊆ A` |

use crate::error::Result;
use crate::fdalg::AlgElement;
use crate::ideals::{split_in_sum, BlockIdeal, StarMorphism};
use crate::random::{derive_seed, SampleRng};
use crate::report::LawTally;

pub type LemmaReport = LawTally;

pub const LAW_NAMES: [&str; 14] = [
    "image_ideal.forward",
    "image_ideal.backward",
    "image_cone.forward",
    "image_cone.backward",
    "ideal_cone_image.forward",
    "ideal_cone_image.backward",
    "cone_sum_image.forward",
    "cone_sum_image.backward",
    "sum_cone_image.forward",
    "sum_cone_image.backward",
    "cone_in_range.forward",
    "cone_in_range.backward",
    "subalgebra_cone.forward",
    "subalgebra_cone.backward",
];

/// Outcome of one sampled check: whether it held, and its worst relative residual.
#[derive(Clone, Copy, Debug)]
struct Check {
    ok: bool,
    residual: f64,
}

impl Check {
    fn new() -> Self {
        Check {
            ok: true,
            residual: 0.0,
        }
    }

    fn require(&mut self, cond: bool) {
        self.ok &= cond;
    }

    /// A residual that must stay within `tol`.
    fn residual(&mut self, r: f64, tol: f64) {
        self.residual = self.residual.max(r);
        self.ok &= r <= tol;
    }

    fn positive(&mut self, x: &AlgElement, tol: f64) -> Result<()> {
        self.require(x.is_positive(tol)?);
        self.residual = self.residual.max(x.positivity_defect()?);
        Ok(())
    }

    fn member(&mut self, x: &AlgElement, ideal: &BlockIdeal, tol: f64) {
        let mass = ideal
            .first_violation(x, 0.0)
            .map(|(_, m)| m / x.frobenius_norm().max(1.0))
            .unwrap_or(0.0);
        self.require(ideal.contains(x, tol));
        self.residual = self.residual.max(mass);
    }
}

/// Runs every law `trials` times; trial `t` draws from `derive_seed(seed, t)`.
pub fn lemma_suite(
    phi: &StarMorphism,
    i: &BlockIdeal,
    j: &BlockIdeal,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<LemmaReport> {
    let images = Images::new(phi, i, j)?;
    let mut report = LawTally::default();
    for name in LAW_NAMES {
        report.law(name);
    }
    for t in 0..trials {
        let mut rng = SampleRng::new(derive_seed(seed, t));
        run_trial(&images, &mut rng, tol, &mut report);
    }
    Ok(report)
}

struct Images<'a> {
    phi: &'a StarMorphism,
    i: &'a BlockIdeal,
    j: &'a BlockIdeal,
    phi_i: BlockIdeal,
    phi_j: BlockIdeal,
    /// Source blocks that survive `φ`; `lift(B)` is supported exactly here.
    survivors: BlockIdeal,
}

impl<'a> Images<'a> {
    fn new(phi: &'a StarMorphism, i: &'a BlockIdeal, j: &'a BlockIdeal) -> Result<Self> {
        let survivors = BlockIdeal::new(
            phi.source().clone(),
            phi.kept_blocks().iter().copied().collect(),
        )?;
        Ok(Images {
            phi,
            i,
            j,
            phi_i: phi.image_ideal(i)?,
            phi_j: phi.image_ideal(j)?,
            survivors,
        })
    }
}

fn run_trial(im: &Images, rng: &mut SampleRng, tol: f64, report: &mut LawTally) {
    type Law = fn(&Images, &mut SampleRng, f64) -> Result<Check>;
    let laws: [(&str, Law); 14] = [
        ("image_ideal.forward", image_ideal_forward),
        ("image_ideal.backward", image_ideal_backward),
        ("image_cone.forward", image_cone_forward),
        ("image_cone.backward", image_cone_backward),
        ("ideal_cone_image.forward", ideal_cone_image_forward),
        ("ideal_cone_image.backward", ideal_cone_image_backward),
        ("cone_sum_image.forward", cone_sum_image_forward),
        ("cone_sum_image.backward", cone_sum_image_backward),
        ("sum_cone_image.forward", sum_cone_image_forward),
        ("sum_cone_image.backward", sum_cone_image_backward),
        ("cone_in_range.forward", cone_in_range_forward),
        ("cone_in_range.backward", cone_in_range_backward),
        ("subalgebra_cone.forward", subalgebra_cone_forward),
        ("subalgebra_cone.backward", subalgebra_cone_backward),
    ];
    for (name, law) in laws {
        match law(im, rng, tol) {
            Ok(c) => report.record(name, c.ok, c.residual),
            Err(_) => report.record(name, false, f64::INFINITY),
        };
    }
}

/// Images of `I` are absorbed by multiplication from both sides and closed under `*`.
fn image_ideal_forward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    for (ideal, image) in [(im.i, &im.phi_i), (im.j, &im.phi_j)] {
        let y = im.phi.apply(&rng.member(ideal))?;
        let x = rng.element(im.phi.target());
        c.member(&y, image, tol);
        c.member(&x.mul(&y)?, image, tol);
        c.member(&y.mul(&x)?, image, tol);
        c.member(&y.star(), image, tol);
    }
    Ok(c)
}

/// Every member of `φ(I)` has a preimage inside `I`.
fn image_ideal_backward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    for (ideal, image) in [(im.i, &im.phi_i), (im.j, &im.phi_j)] {
        let y = rng.member(image);
        let x = im.phi.lift_with(&y, &rng.member(ideal))?;
        c.member(&x, ideal, tol);
        c.residual(im.phi.apply(&x)?.relative_distance(&y), tol);
    }
    Ok(c)
}

fn image_cone_forward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let p = rng.positive_element(im.phi.source());
    c.positive(&im.phi.apply(&p)?, tol)?;
    Ok(c)
}

/// `x = y²` with `y = √x`; any Hermitian preimage `b` of `y` gives `b² ∈ A⁺`
/// with `φ(b²) = x`.
fn image_cone_backward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let x = rng.positive_element(im.phi.target());
    let y = x.sqrt_positive(tol)?;
    // An arbitrary preimage need not be Hermitian; its Hermitian part still maps to y.
    let b = im
        .phi
        .lift_with(&y, &rng.element(im.phi.source()))?
        .hermitian_part();
    let b2 = b.mul(&b)?;
    c.positive(&b2, tol)?;
    c.residual(im.phi.apply(&b2)?.relative_distance(&x), tol);
    Ok(c)
}

fn ideal_cone_image_forward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    for (ideal, image) in [(im.i, &im.phi_i), (im.j, &im.phi_j)] {
        let y = im.phi.apply(&rng.positive_member(ideal))?;
        c.positive(&y, tol)?;
        c.member(&y, image, tol);
    }
    Ok(c)
}

/// Preimage in `I⁺` of a positive `x ∈ φ(I)`: square a Hermitian preimage of `√x`
/// taken inside `I`.
fn positive_preimage_in(
    im: &Images,
    ideal: &BlockIdeal,
    x: &AlgElement,
    rng: &mut SampleRng,
    tol: f64,
) -> Result<AlgElement> {
    let y = x.sqrt_positive(tol)?;
    let b = im
        .phi
        .lift_with(&y, &rng.hermitian_member(ideal))?
        .hermitian_part();
    b.mul(&b)
}

fn ideal_cone_image_backward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    for (ideal, image) in [(im.i, &im.phi_i), (im.j, &im.phi_j)] {
        let x = rng.positive_member(image);
        let p = positive_preimage_in(im, ideal, &x, rng, tol)?;
        c.positive(&p, tol)?;
        c.member(&p, ideal, tol);
        c.residual(im.phi.apply(&p)?.relative_distance(&x), tol);
    }
    Ok(c)
}

fn cone_sum_image_forward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let p = rng.positive_member(im.i);
    let q = rng.positive_member(im.j);
    let (u, v) = (im.phi.apply(&p)?, im.phi.apply(&q)?);
    c.positive(&u, tol)?;
    c.member(&u, &im.phi_i, tol);
    c.positive(&v, tol)?;
    c.member(&v, &im.phi_j, tol);
    c.residual(
        im.phi.apply(&p.add(&q)?)?.relative_distance(&u.add(&v)?),
        tol,
    );
    Ok(c)
}

fn cone_sum_image_backward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let u = rng.positive_member(&im.phi_i);
    let v = rng.positive_member(&im.phi_j);
    let p = positive_preimage_in(im, im.i, &u, rng, tol)?;
    let q = positive_preimage_in(im, im.j, &v, rng, tol)?;
    c.positive(&p, tol)?;
    c.member(&p, im.i, tol);
    c.positive(&q, tol)?;
    c.member(&q, im.j, tol);
    c.residual(
        im.phi.apply(&p.add(&q)?)?.relative_distance(&u.add(&v)?),
        tol,
    );
    Ok(c)
}

/// `c = (a+b)*(a+b)` with `a ∈ I`, `b ∈ J` maps to `(φa+φb)*(φa+φb) ∈ (φ(I)+φ(J))⁺`.
fn sum_cone_image_forward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let a = rng.member(im.i);
    let b = rng.member(im.j);
    let s = a.add(&b)?;
    let img = im.phi.apply(&s.star_square())?;
    let target_sum = im.phi_i.sum(&im.phi_j)?;
    c.positive(&img, tol)?;
    c.member(&img, &target_sum, tol);
    let expected = im.phi.apply(&a)?.add(&im.phi.apply(&b)?)?.star_square();
    c.residual(img.relative_distance(&expected), tol);
    Ok(c)
}

/// For positive `t ∈ φ(I)+φ(J)`: `√t = x + y` with `x ∈ φ(I)`, `y ∈ φ(J)`, so
/// `t = (x+y)*(x+y)`; lifting `x`, `y` into `I`, `J` gives `c = (a+b)*(a+b) ∈ (I+J)⁺`
/// with `φ(c) = t`.
fn sum_cone_image_backward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let target_sum = im.phi_i.sum(&im.phi_j)?;
    let t = rng.positive_member(&target_sum);
    let root = t.sqrt_positive(tol)?;
    let (x, y) = split_in_sum(&root, &im.phi_i, &im.phi_j, tol)?;
    let a = im.phi.lift(&x)?;
    let b = im.phi.lift(&y)?;
    c.member(&a, im.i, tol);
    c.member(&b, im.j, tol);
    let pre = a.add(&b)?.star_square();
    c.positive(&pre, tol)?;
    c.member(&pre, &im.i.sum(im.j)?, tol);
    c.residual(im.phi.apply(&pre)?.relative_distance(&t), tol);
    Ok(c)
}

/// `φ(A)` is all of `B`; membership is witnessed by `φ(lift(y)) = y`.
fn in_range_residual(im: &Images, y: &AlgElement) -> Result<f64> {
    Ok(im.phi.apply(&im.phi.lift(y)?)?.relative_distance(y))
}

fn cone_in_range_forward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let p = rng.positive_element(im.phi.source());
    let y = im.phi.apply(&p)?;
    c.positive(&y, tol)?;
    c.residual(in_range_residual(im, &y)?, tol);
    Ok(c)
}

fn cone_in_range_backward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let x = rng.positive_element(im.phi.target());
    c.residual(in_range_residual(im, &x)?, tol);
    let a = im.phi.lift(&x)?;
    c.positive(&a, tol)?;
    c.residual(im.phi.apply(&a)?.relative_distance(&x), tol);
    Ok(c)
}

/// Positive in the subalgebra `S = lift(B)` implies positive in `A` and lying in `S`.
fn subalgebra_cone_forward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let y = rng.positive_element(im.phi.target());
    let s = im.phi.lift(&y)?;
    c.positive(&s, tol)?;
    c.member(&s, &im.survivors, tol);
    c.residual(im.phi.lift(&im.phi.apply(&s)?)?.relative_distance(&s), tol);
    Ok(c)
}

/// A positive element of `A` lying in `S` is positive intrinsically in `S ≅ B`.
fn subalgebra_cone_backward(im: &Images, rng: &mut SampleRng, tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let p = rng.positive_member(&im.survivors);
    let z = im.phi.apply(&p)?;
    c.residual(im.phi.lift(&z)?.relative_distance(&p), tol);
    c.positive(&z, tol)?;
    Ok(c)
}
