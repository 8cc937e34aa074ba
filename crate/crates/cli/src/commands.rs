use std::path::Path;

use krorder::choice::{
    affine_core_approx, default_lambda_grid, default_probes, max_set, scalarization_bounds, ChoiceProblem,
    FunctionalOracle, PreferenceOracle,
};
use krorder::measure::{difference, ProbMeasure, Weights};
use krorder::portfolio::{maximize_portfolio, PiecewiseLinearUtility, PortfolioOptions, Scenario};
use krorder::preorder::{
    adversarial_pair, certify_lipschitz_axiom, compare, expectation_gaps, lipschitz_margin_with_member,
    make_proper_family, UtilityFamily,
};
use krorder::random::rng;
use krorder::selftest::run_selftest;
use krorder::separation::{cone_membership, represent, separating_witness, PreferenceCone, Separation};
use krorder::space::MetricSpace;
use krorder::stochastic::{distance_is_increasing, fosd_univariate, stochastic_order_poset};
use krorder::transport::{kr_norm, kr_norm_dual, w1_dual, w1_primal};
use krorder::uncertainty::{extract_prior, is_locally_prob_sophisticated, Act, StateUtilityFamily};

use crate::input::{
    ActFile, ConeFile, FamilyFile, Loader, MenuFile, OracleFile, PanelFile, StateFamilyFile,
};
use crate::output::*;
use crate::{to_json, CliError, Command};

/// Mixing weights tried by `certify`: `k/20` for `k = 1..20`.
fn certify_grid() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

pub(crate) fn execute(cmd: &Command, seed: u64, loader: &Loader) -> Result<String, CliError> {
    Ok(match cmd {
        Command::Validate { space } => {
            let file = loader.space_file(space)?;
            let sp = file.space()?;
            let poset = match &file.leq {
                Some(l) => {
                    let poset = krorder::space::FinitePoset::new(&sp, l.clone())?;
                    Some(PosetSummary {
                        lower_sets: poset.lower_sets()?.len(),
                        distance_increasing: distance_is_increasing(&poset)?,
                    })
                }
                None => None,
            };
            to_json(&ValidateOut {
                valid: true,
                points: sp.len(),
                base: sp.base(),
                diameter: sp.diameter(),
                poset,
            })
        }
        Command::W1 { space, p, q } => {
            let sp = loader.space(space)?;
            let (p, q) = (loader.prob(&sp, p)?, loader.prob(&sp, q)?);
            let plan = w1_primal(&p, &q)?;
            let pot = w1_dual(&p, &q)?;
            to_json(&W1Out {
                w1: plan.cost,
                plan: plan.coupling,
                potential: pot.f.values().to_vec(),
                dual_value: pot.value,
            })
        }
        Command::Krnorm { space, mu } => {
            let sp = loader.space(space)?;
            let mu = loader.signed(&sp, mu)?;
            to_json(&KrNormOut {
                kr_norm: kr_norm(&mu)?,
                kr_norm_dual: kr_norm_dual(&mu)?,
            })
        }
        Command::Compare { space, family, p, q } => {
            let (sp, fam, p, q) = family_pair(loader, space, family, p, q)?;
            let _ = sp;
            to_json(&CompareOut {
                result: compare(&fam, &p, &q)?.into(),
                margins: expectation_gaps(&fam, &p, &q)?,
            })
        }
        Command::Margin { space, family, p, q } => {
            let (_, fam, p, q) = family_pair(loader, space, family, p, q)?;
            let (margin, member) = lipschitz_margin_with_member(&fam, &p, &q)?;
            let (ap, aq) = adversarial_pair(&fam, &p, &q)?;
            to_json(&MarginOut {
                margin,
                member,
                adversarial_p: ap.weights().to_vec(),
                adversarial_q: aq.weights().to_vec(),
            })
        }
        Command::Certify { space, family, p, q, trials } => {
            let (_, fam, p, q) = family_pair(loader, space, family, p, q)?;
            let report = certify_lipschitz_axiom(&fam, &p, &q, *trials, &certify_grid(), &mut rng(seed))?;
            to_json(&CertifyOut {
                margin: report.margin,
                trials: *trials,
                checked: report.checked,
                skipped: report.skipped,
                boundary: report.boundary,
                violations: report
                    .violations
                    .into_iter()
                    .map(|v| ViolationOut {
                        trial: v.trial,
                        lambda: v.lambda,
                        bound: v.bound,
                        w1: v.w1,
                    })
                    .collect(),
            })
        }
        Command::Witness { space, cone, p, q } => {
            let (_, cone, p, q) = cone_pair(loader, space, cone, p, q)?;
            to_json(&match separating_witness(&cone, &p, &q)? {
                Separation::Witness(w) => WitnessOut {
                    witness: Some(w.u.values().to_vec()),
                    margin: Some(w.margin),
                    boundary: None,
                    optimum: w.margin,
                },
                Separation::NotSeparable { optimum, boundary } => WitnessOut {
                    witness: None,
                    margin: None,
                    boundary: Some(boundary),
                    optimum,
                },
            })
        }
        Command::Membership { space, cone, p, q } => {
            let (_, cone, p, q) = cone_pair(loader, space, cone, p, q)?;
            let m = cone_membership(&cone, &difference(&p, &q)?)?;
            to_json(&MembershipOut {
                member: m.member,
                residual: m.member.then_some(m.residual),
                coefficients: m.coefficients,
            })
        }
        Command::Represent { space, cone, panel } => {
            let sp = loader.space(space)?;
            let cone = load_cone(loader, &sp, cone)?;
            let file: PanelFile = loader.json(panel)?;
            let panel = file
                .pairs
                .into_iter()
                .map(|pq| Ok((ProbMeasure::new(&sp, pq.p)?, ProbMeasure::new(&sp, pq.q)?)))
                .collect::<krorder::Result<Vec<_>>>()?;
            let fam = represent(&cone, &panel)?;
            to_json(&RepresentOut { members: fam.values() })
        }
        Command::Dominance { space, p, q, poset } => {
            let sp = loader.space(space)?;
            let (pm, qm) = (loader.prob(&sp, p)?, loader.prob(&sp, q)?);
            let (d, method) = match loader.poset(space, &sp, poset.as_deref())? {
                Some(poset) => (stochastic_order_poset(&pm, &qm, &poset)?, DominanceMethod::Poset),
                None => (fosd_univariate(&pm, &qm)?, DominanceMethod::Univariate),
            };
            to_json(&DominanceOut {
                dominates: d.dominates,
                violating_set: d.violating_set,
                method,
            })
        }
        Command::Maxset { space, family, menu } => {
            let sp = loader.space(space)?;
            let fam = load_family(loader, &sp, family)?;
            let menu = load_menu(loader, &sp, menu)?;
            let maximal = max_set(&menu, &fam)?;
            let mut panel = Vec::new();
            for (i, a) in menu.iter().enumerate() {
                for b in &menu[i + 1..] {
                    panel.push((a.clone(), b.clone()));
                }
            }
            let proper = make_proper_family(&fam, &panel)?;
            let problem = ChoiceProblem::new(menu, fam, proper.family)?;
            let bounds = scalarization_bounds(&problem)?;
            to_json(&MaxsetOut {
                maximal,
                lower: bounds.lower,
                upper: bounds.upper,
                upper_members: bounds.upper_members,
                truncation: proper.truncation,
            })
        }
        Command::Affinecore { space, oracle, p, q, menu } => {
            let sp = loader.space(space)?;
            let file: OracleFile = loader.json(oracle)?;
            let oracle = FunctionalOracle::new(&sp, file.criteria, file.lipschitz_bound)?;
            let (p, q) = (loader.prob(&sp, p)?, loader.prob(&sp, q)?);
            let menu = match menu {
                Some(m) => load_menu(loader, &sp, m)?,
                None => Vec::new(),
            };
            let probes = default_probes(&sp, &menu);
            let t = affine_core_approx(&oracle, &p, &q, &probes, &default_lambda_grid())?;
            to_json(&AffineCoreOut {
                oracle_prefers: oracle.weakly_prefers(&p, &q)?,
                holds: t.holds,
                approximate: t.approximate,
                failing_probe: t.failing_probe.map(|(probe, lambda)| FailingProbe { probe, lambda }),
            })
        }
        Command::Prior { space, family, act } => {
            let sp = loader.space(space)?;
            let file: StateFamilyFile = loader.json(family)?;
            let fam = StateUtilityFamily::new(&sp, file.states, file.members)?;
            let (prior, base) = extract_prior(&fam)?;
            let (act_sophisticated, act_prior) = match act {
                Some(path) => {
                    let af: ActFile = loader.json(path)?;
                    let measures = af
                        .measures
                        .into_iter()
                        .map(|w| ProbMeasure::new(&sp, w))
                        .collect::<krorder::Result<Vec<_>>>()?;
                    let f = Act::new(af.states, measures)?;
                    let found = is_locally_prob_sophisticated(&fam, &f, std::slice::from_ref(&prior))?;
                    (Some(found.is_some()), found.map(|a| a.alpha().to_vec()))
                }
                None => (None, None),
            };
            to_json(&PriorOut {
                prior: prior.alpha().to_vec(),
                base_utilities: base.values(),
                act_sophisticated,
                act_prior,
            })
        }
        Command::Portfolio { scenario, utility, prices, wealth, bounds, iterations } => {
            let sc: Scenario = loader.json(scenario)?;
            let u: PiecewiseLinearUtility = loader.json(utility)?;
            let bounding_box = match bounds {
                None => None,
                Some(b) => {
                    if b.len() != 2 * sc.dim() {
                        return Err(CliError::MalformedInput(format!(
                            "--box needs {} values (lo,hi per asset), got {}",
                            2 * sc.dim(),
                            b.len()
                        )));
                    }
                    Some(b.chunks(2).map(|c| (c[0], c[1])).collect())
                }
            };
            let opts = PortfolioOptions {
                iterations: *iterations,
                bounding_box,
                seed,
                ..PortfolioOptions::default()
            };
            let s = maximize_portfolio(&sc, &u, prices, *wealth, &opts)?;
            to_json(&PortfolioOut {
                alpha: s.alpha,
                value: s.value,
                certificate_norm: s.certificate_norm,
                certified: s.certified,
                lipschitz_bound: s.lipschitz_bound,
                concave: s.concave,
                best_start: s.best_start,
            })
        }
        Command::Selftest => {
            let r = run_selftest(seed)?;
            to_json(&SelftestOut {
                seed: r.seed,
                passed: r.passed,
                total: r.total,
                criteria: r.criteria.into_iter().map(Into::into).collect(),
                supplementary: r.supplementary.into_iter().map(Into::into).collect(),
            })
        }
    })
}

fn load_family(loader: &Loader, sp: &MetricSpace, path: &Path) -> Result<UtilityFamily, CliError> {
    let file: FamilyFile = loader.json(path)?;
    Ok(UtilityFamily::new(sp, file.members)?)
}

fn load_menu(loader: &Loader, sp: &MetricSpace, path: &Path) -> Result<Vec<ProbMeasure>, CliError> {
    let file: MenuFile = loader.json(path)?;
    Ok(file
        .measures
        .into_iter()
        .map(|w| ProbMeasure::new(sp, w))
        .collect::<krorder::Result<Vec<_>>>()?)
}

fn load_cone(loader: &Loader, sp: &MetricSpace, path: &Path) -> Result<PreferenceCone, CliError> {
    let file: ConeFile = loader.json(path)?;
    let pairs = file
        .pairs
        .into_iter()
        .map(|d| Ok((ProbMeasure::new(sp, d.better)?, ProbMeasure::new(sp, d.worse)?)))
        .collect::<krorder::Result<Vec<_>>>()?;
    Ok(PreferenceCone::from_pairs(sp, &pairs)?)
}

type FamilyPair = (MetricSpace, UtilityFamily, ProbMeasure, ProbMeasure);

fn family_pair(loader: &Loader, space: &Path, family: &Path, p: &Path, q: &Path) -> Result<FamilyPair, CliError> {
    let sp = loader.space(space)?;
    let fam = load_family(loader, &sp, family)?;
    let (p, q) = (loader.prob(&sp, p)?, loader.prob(&sp, q)?);
    Ok((sp, fam, p, q))
}

type ConePair = (MetricSpace, PreferenceCone, ProbMeasure, ProbMeasure);

fn cone_pair(loader: &Loader, space: &Path, cone: &Path, p: &Path, q: &Path) -> Result<ConePair, CliError> {
    let sp = loader.space(space)?;
    let cone = load_cone(loader, &sp, cone)?;
    let (p, q) = (loader.prob(&sp, p)?, loader.prob(&sp, q)?);
    Ok((sp, cone, p, q))
}
