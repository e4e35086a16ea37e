//! The letter/system/outcome state after measurement, its mutual entropies,
//! and the identities linking them to the chi-quantity expressions.

use crate::entropy::{chi, chi_quantity, hybrid_rel_entropy, kl_weights, mutual_info_classical};
use crate::error::Result;
use crate::hall::{build_hall, hall_joint, hall_residuals, HallPackage};
use crate::instrument::{channel_lambda_i, Instrument};
use crate::matrix::HermitianMatrix;
use crate::states::{weighted_sum, Ensemble, HybridState, ProbVector, TripartiteState};

use super::{hall_and_nub, lower_bounds, measurement_data, sww_from, MeasurementData};

/// A mutual entropy computed as a relative entropy and through its
/// chi-quantity expression.
#[derive(Clone, Debug, PartialEq)]
pub struct MutualEntropy {
    pub name: &'static str,
    pub relative: f64,
    pub formula: f64,
}

impl MutualEntropy {
    pub fn residual(&self) -> f64 {
        (self.relative - self.formula).abs()
    }
}

#[derive(Clone, Debug)]
pub struct TripartiteReport {
    pub state: TripartiteState,
    pub mutual: Vec<MutualEntropy>,
    /// Mutual entropy of the initial letter/system state.
    pub initial: MutualEntropy,
    /// Max deviation between the image of the product input and the
    /// product of the output marginals.
    pub product_residual: f64,
}

/// An identity `lhs = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        IdentityCheck { name: name.to_string(), lhs, rhs }
    }

    pub fn residual(&self) -> f64 {
        if self.lhs == self.rhs {
            0.0
        } else {
            (self.lhs - self.rhs).abs()
        }
    }
}

fn hybrid(labels: Vec<String>, blocks: Vec<HermitianMatrix>) -> Result<HybridState> {
    HybridState::new(labels, blocks)
}

fn rel(a: &HybridState, b: &HybridState) -> Result<f64> {
    Ok(hybrid_rel_entropy(a, b)?.value())
}

pub fn tripartite_final(e: &Ensemble, inst: &Instrument) -> Result<TripartiteReport> {
    let data = measurement_data(e, inst)?;
    let p_i = e.prior().weights();
    let blocks: Vec<Vec<HermitianMatrix>> = e
        .states()
        .iter()
        .zip(p_i)
        .map(|(rho, &p)| {
            Ok(channel_lambda_i(inst, rho)?.blocks().iter().map(|b| b.scale(p)).collect())
        })
        .collect::<Result<_>>()?;
    let state = TripartiteState::new(e.labels().to_vec(), inst.labels().to_vec(), blocks)?;
    let mutual = mutual_entropies(&state, &data)?;

    // initial letter/system state against the product of its marginals
    let initial_state = HybridState::from_ensemble(e);
    let initial_product = HybridState::product(e.prior(), &e.average());
    let initial = MutualEntropy {
        name: "initial letters:system",
        relative: rel(&initial_state, &initial_product)?,
        formula: chi_quantity(e),
    };

    // the product input maps to letters (x) (system, outcomes) marginal
    let image = channel_lambda_i(inst, &data.eta_i)?;
    let marginal_0 = state.marginal_0();
    let marginal_12 = state.marginal_12();
    let mut product_residual: f64 = 0.0;
    for (&p, &q) in p_i.iter().zip(marginal_0.weights()) {
        for (a, b) in image.blocks().iter().zip(marginal_12.blocks()) {
            product_residual =
                product_residual.max(a.matrix().scale(p).max_abs_diff(&b.matrix().scale(q)));
        }
    }
    Ok(TripartiteReport { state, mutual, initial, product_residual })
}

fn mutual_entropies(state: &TripartiteState, data: &MeasurementData) -> Result<Vec<MutualEntropy>> {
    let p0 = state.marginal_0();
    let p2 = state.marginal_2();
    let s1 = state.marginal_1();
    let s01 = state.marginal_01();
    let s12 = state.marginal_12();
    let j02 = state.marginal_02();
    let full = state.as_hybrid();
    let flat = full.labels().to_vec();
    let i_c = data.i_c();

    let n_out = p2.len();
    let flat_product = |f: &dyn Fn(usize, usize) -> HermitianMatrix| -> Result<HybridState> {
        let mut blocks = Vec::with_capacity(flat.len());
        for a in 0..p0.len() {
            for w in 0..n_out {
                blocks.push(f(a, w));
            }
        }
        hybrid(flat.clone(), blocks)
    };

    let prod_0_2 = ProbVector::from_weights(
        p0.weights().iter().flat_map(|&a| p2.weights().iter().map(move |&b| a * b)).collect(),
    )?;
    let i_02 = kl_weights(j02.flatten().weights(), prod_0_2.weights()).value();

    let i_01 = rel(&s01, &HybridState::product(&p0, &s1))?;
    let i_12 = rel(&s12, &HybridState::product(&p2, &s1))?;
    let i_02_1 = rel(&full, &HybridState::product(&j02.flatten(), &s1))?;
    let i_0_12 = rel(&full, &flat_product(&|a, w| s12.blocks()[w].scale(p0.weights()[a]))?)?;
    let i_01_2 = rel(&full, &flat_product(&|a, w| s01.blocks()[a].scale(p2.weights()[w]))?)?;
    let i_0_1_2 = rel(
        &full,
        &flat_product(&|a, w| s1.hermitian().scale(p0.weights()[a] * p2.weights()[w]))?,
    )?;

    Ok(vec![
        MutualEntropy { name: "letters:outcomes", relative: i_02, formula: i_c },
        MutualEntropy { name: "letters:system", relative: i_01, formula: data.chi_a_priori() },
        MutualEntropy { name: "system:outcomes", relative: i_12, formula: data.chi_posterior() },
        MutualEntropy { name: "letters+outcomes:system", relative: i_02_1, formula: data.chi_joint() },
        MutualEntropy {
            name: "letters:system+outcomes",
            relative: i_0_12,
            formula: i_c + data.mean_posterior_chi(),
        },
        MutualEntropy {
            name: "letters+system:outcomes",
            relative: i_01_2,
            formula: i_c + data.mean_letter_chi(),
        },
        MutualEntropy {
            name: "letters:system:outcomes",
            relative: i_0_1_2,
            formula: i_c + data.chi_joint(),
        },
    ])
}

/// The channel `f -> {sum_w f(a, w) sigma(w)}` applied to the joint
/// distribution and to the product of its marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaReport {
    /// `max_a |Gamma[p_if](a) - p_i(a) xi(a)|`.
    pub joint_residual: f64,
    /// `max_a |Gamma[p_i p_f](a) - p_i(a) eta_i|`.
    pub product_residual: f64,
    /// Relative entropy of the two images.
    pub image_relative: f64,
    pub b_nlb: f64,
    pub i_c: f64,
}

impl GammaReport {
    /// `I_c - S(Gamma[p_if] || Gamma[p_i p_f])`, nonnegative by monotonicity.
    pub fn slack(&self) -> f64 {
        self.i_c - self.image_relative
    }
}

pub fn gamma_channel_check(e: &Ensemble, pkg: &HallPackage) -> Result<GammaReport> {
    let p_i = pkg.marginals.rows.weights();
    let p_f = pkg.marginals.cols.weights();
    let eta = e.average();
    let mut joint_blocks = Vec::with_capacity(p_i.len());
    let mut product_blocks = Vec::with_capacity(p_i.len());
    let mut joint_residual: f64 = 0.0;
    let mut product_residual: f64 = 0.0;
    for (a, row) in pkg.joint.table().iter().enumerate() {
        let image = weighted_sum(row, &pkg.sigma);
        joint_residual =
            joint_residual.max(image.matrix().max_abs_diff(&pkg.xi[a].matrix().scale(p_i[a])));
        let prod: Vec<f64> = p_f.iter().map(|q| p_i[a] * q).collect();
        let image_p = weighted_sum(&prod, &pkg.sigma);
        product_residual =
            product_residual.max(image_p.matrix().max_abs_diff(&eta.matrix().scale(p_i[a])));
        joint_blocks.push(image);
        product_blocks.push(image_p);
    }
    let labels = pkg.joint.row_labels().to_vec();
    let image_relative = rel(&hybrid(labels.clone(), joint_blocks)?, &hybrid(labels, product_blocks)?)?;
    let (b_nlb, _) = lower_bounds(e, pkg);
    Ok(GammaReport {
        joint_residual,
        product_residual,
        image_relative,
        b_nlb,
        i_c: mutual_info_classical(&pkg.joint),
    })
}

/// Every exact identity between the quantities of one scenario. The
/// average state must be invertible.
pub fn identity_suite(e: &Ensemble, inst: &Instrument) -> Result<Vec<IdentityCheck>> {
    let data = measurement_data(e, inst)?;
    let pkg = build_hall(e, &inst.povm())?;
    let sww = sww_from(&data);
    let upper = hall_and_nub(e, &pkg)?;
    let tri = tripartite_final(e, inst)?;
    let gamma = gamma_channel_check(e, &pkg)?;
    let i_c = data.i_c();
    let residuals = hall_residuals(e, &pkg);

    let mut out = vec![
        IdentityCheck::new(
            "joint chi splits over outcomes",
            data.chi_joint(),
            data.chi_posterior() + data.mean_posterior_chi(),
        ),
        IdentityCheck::new(
            "posterior and a priori chi decompositions agree",
            data.chi_posterior() + data.mean_posterior_chi(),
            data.chi_a_priori() + data.mean_letter_chi(),
        ),
        IdentityCheck::new("B_SWW direct and symmetric forms", sww.value, sww.symmetric),
        IdentityCheck::new(
            "I_c invariant under Hall transformation",
            mutual_info_classical(&hall_joint(&pkg)?),
            i_c,
        ),
        IdentityCheck::new("product input maps to product output", tri.product_residual, 0.0),
        IdentityCheck::new("initial mutual entropy", tri.initial.relative, tri.initial.formula),
        IdentityCheck::new("Gamma image of joint", gamma.joint_residual, 0.0),
        IdentityCheck::new("Gamma image of product", gamma.product_residual, 0.0),
        IdentityCheck::new("Gamma image relative entropy is b_nlb", gamma.image_relative, gamma.b_nlb),
        IdentityCheck::new("dual gain at average is chi", upper.dual_gain_at_average, data.chi_i),
        IdentityCheck::new("dual POVM completeness", residuals.completeness, 0.0),
        IdentityCheck::new("sigma average", residuals.sigma_average, 0.0),
        IdentityCheck::new("xi average", residuals.xi_average, 0.0),
        IdentityCheck::new("epsilon average", residuals.epsilon_average, 0.0),
        IdentityCheck::new(
            "a priori bookkeeping",
            weighted_sum(e.prior().weights(), &data.eta_f_letters)
                .matrix()
                .max_abs_diff(data.eta_f.matrix()),
            0.0,
        ),
        IdentityCheck::new(
            "posterior bookkeeping",
            weighted_sum(data.marginals.cols.weights(), &data.rho_f)
                .matrix()
                .max_abs_diff(data.eta_f.matrix()),
            0.0,
        ),
    ];
    for m in &tri.mutual {
        out.push(IdentityCheck::new(m.name, m.relative, m.formula));
    }
    // chi of the initial ensemble recomputed on the flattened letters
    out.push(IdentityCheck::new(
        "chi of ensemble",
        chi(e.prior().weights(), e.states()),
        data.chi_i,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{random_scenario, two_level_example_a, two_level_example_b};
    use crate::matrix::SquareMatrix;
    use crate::states::DensityMatrix;

    #[test]
    fn trivial_instrument_single_letter() {
        let e = Ensemble::new(
            ProbVector::from_weights(vec![1.0]).unwrap(),
            vec![DensityMatrix::maximally_mixed(2)],
        )
        .unwrap();
        let inst = Instrument::single(SquareMatrix::identity(2)).unwrap();
        let t = tripartite_final(&e, &inst).unwrap();
        for m in &t.mutual {
            assert!(m.relative.abs() < 1e-12 && m.formula.abs() < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn identities_on_examples() {
        for s in [two_level_example_a(1.0).unwrap(), two_level_example_b(1.0).unwrap()] {
            for c in identity_suite(&s.ensemble, &s.instrument).unwrap() {
                assert!(c.residual() < 1e-9, "{}: {c:?}", s.label);
            }
        }
    }

    #[test]
    fn identities_on_random_three_letter_scenarios() {
        for seed in 0..20 {
            let s = random_scenario(seed, 2, 3, 3, 2).unwrap();
            for c in identity_suite(&s.ensemble, &s.instrument).unwrap() {
                assert!(c.residual() < 1e-9, "seed {seed}: {c:?}");
            }
        }
    }

    #[test]
    fn gamma_slack_is_nonnegative() {
        let s = two_level_example_a(1.0).unwrap();
        let pkg = build_hall(&s.ensemble, &s.instrument.povm()).unwrap();
        let g = gamma_channel_check(&s.ensemble, &pkg).unwrap();
        assert!(g.slack() >= -1e-9);
        assert!((g.image_relative - g.b_nlb).abs() < 1e-9);
    }
}
