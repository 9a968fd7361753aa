//! Condition checkers across the model families: tail summability,
//! second-moment ratio trend, pairwise independence, and mixing, with the
//! witness each verdict rests on.

use bc_lab::diagnostics::{
    check_bc1, check_mixing_condition, check_pairwise_independent, kochen_stone_ratio,
    MixingProfile,
};
use bc_lab::models::{
    FiniteStaticModel, IndependentModel, MarginalSpec, Model, TwoStateMarkovModel,
};

fn main() {
    let summable = Model::Independent(
        IndependentModel::new(MarginalSpec::Power {
            c: 1.0,
            alpha: 2.0,
            shift: 1,
        })
        .unwrap(),
    );
    let half =
        Model::Independent(IndependentModel::new(MarginalSpec::Constant { p: 0.5 }).unwrap());
    let markov = Model::Markov(TwoStateMarkovModel::symmetric(0.3).unwrap());
    let dependent = Model::FiniteStatic(FiniteStaticModel::counterexample_preset());

    let bc1 = check_bc1(&summable, 64).unwrap();
    println!("summable marginals on 1/(n+1)^2: {:?} — {}", bc1.verdict, bc1.note);
    let bc1_half = check_bc1(&half, 64).unwrap();
    println!("summable marginals on p = 0.5:   {:?} — {}", bc1_half.verdict, bc1_half.note);

    let ks = kochen_stone_ratio(&half, &[10, 100, 1000], 1e-3).unwrap();
    println!("\nratio trend on p = 0.5: {:?} — {}", ks.verdict, ks.note);
    let ks_dep = kochen_stone_ratio(&dependent, &[10, 100, 1000], 1e-3).unwrap();
    println!(
        "ratio trend on the dependent preset: {:?} (infimum {:.4}, floor 1/8)",
        ks_dep.verdict,
        ks_dep.running_infimum.last().unwrap()
    );

    let pw = check_pairwise_independent(&dependent, 32, 1e-9).unwrap();
    let witness = pw.witness.unwrap();
    println!(
        "\npairwise independence on the dependent preset: {:?}, worst pair {:?} gap {:.4}",
        pw.verdict, witness.indices, witness.values[2]
    );

    let profile = MixingProfile::Geometric { c: 0.5, r: 0.4 };
    let mix = check_mixing_condition(&markov, &profile, 32, 1e-9).unwrap();
    println!("geometric mixing on the symmetric chain: {:?}", mix.verdict);
    let mix_dep = check_mixing_condition(&dependent, &profile, 32, 1e-9).unwrap();
    println!("geometric mixing on the dependent preset: {:?}", mix_dep.verdict);
}
