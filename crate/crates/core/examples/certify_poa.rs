//! Certificates for three profiles: the symmetric Bernoulli equilibrium,
//! full revelation when every agent is Bernoulli(1/N), and everyone pooling.

use persuasion_poa::certify::{certify_poa, golden_parameters, CertificateCase, PoACertificate};
use persuasion_poa::equilibria::{
    bernoulli_equilibrium_scheme_on_cells, grain_aligned_boundaries, BernoulliEqSpec,
};
use persuasion_poa::mc::McConfig;
use persuasion_poa::model::{EvalMode, StrategyProfile};

fn describe(label: &str, cert: &PoACertificate) {
    let case = match &cert.case {
        CertificateCase::Case1 { bound } => format!("case 1, bound {bound:.4}"),
        CertificateCase::Case2 { i_star, s_star_mean, s_star_floor, bound, tail, .. } => format!(
            "case 2 via agent {i_star}, s* mean {s_star_mean:.4} >= floor {s_star_floor:.4}, \
             tail {:?}, bound {bound:.4}",
            tail.as_ref().map(|t| (t.probability, t.holds))
        ),
        CertificateCase::DeviationWitness { i_star, gain, .. } => {
            format!("not an equilibrium: agent {i_star} gains {gain:.4}")
        }
        CertificateCase::InapplicableProfileNotNe { reason } => format!("inapplicable: {reason}"),
    };
    println!(
        "{label}: {case}\n    welfare {:.4}, first best {:.4}, ratio {:.4}, SW'/SW {:.4}",
        cert.welfare, cert.first_best.value, cert.measured_ratio, cert.sw_prime_ratio
    );
}

fn main() -> persuasion_poa::Result<()> {
    let params = golden_parameters();
    let mode = EvalMode::Auto(McConfig::new(200_000, 1));

    for (n, zeta) in [(2, 0.5), (3, 0.2), (5, 0.2)] {
        let spec = BernoulliEqSpec::new(n, zeta)?;
        let instance = spec.instance()?;
        let cells = grain_aligned_boundaries(spec, 0.1)?;
        let eq = bernoulli_equilibrium_scheme_on_cells(spec, &cells)?;
        let profile = StrategyProfile::symmetric(&instance, eq)?;
        describe(&format!("equilibrium N={n} zeta={zeta}"), &certify_poa(&instance, &profile, params, mode)?);
    }

    for n in [3, 5, 8] {
        let instance = BernoulliEqSpec::new(n, 1.0 / n as f64)?.instance()?;
        let reveal = StrategyProfile::full_revelation(&instance);
        describe(&format!("full revelation N={n}"), &certify_poa(&instance, &reveal, params, mode)?);
        let pool = StrategyProfile::pooling(&instance);
        describe(&format!("pooling N={n}"), &certify_poa(&instance, &pool, params, mode)?);
    }
    Ok(())
}
