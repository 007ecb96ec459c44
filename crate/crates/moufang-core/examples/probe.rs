//! Timing probe for the heavy search paths.

use moufang_core::constructions::*;
use moufang_core::search::*;
use std::time::Instant;

fn probe(name: &str, l: moufang_core::LoopTable) {
    let t0 = Instant::now();
    let cfg = AutSearchConfig::default();
    let ctx = SearchContext::new(&l, &cfg).unwrap();
    println!(
        "{name}: n={} gens={:?} (setup {:?})",
        l.order(),
        ctx.generators(),
        t0.elapsed()
    );
    let t1 = Instant::now();
    let h = ctx.constrained_search(cfg.node_budget).unwrap();
    println!("{name}: |H| = {} ({:?})", h.len(), t1.elapsed());
    let t2 = Instant::now();
    let data = central_data(&ctx, cfg.node_budget).unwrap();
    println!(
        "{name}: |Aut_C| = {:?}, |JAutC| = {}, |CO| = {} ({:?})",
        data.autc.known_order(),
        data.jautc.len(),
        data.orthoautos.len(),
        t2.elapsed()
    );
    let t3 = Instant::now();
    let aut = automorphism_group_in(&ctx, cfg.node_budget).unwrap();
    println!(
        "{name}: |Aut| = {:?} complete={} gens={} ({:?})",
        aut.known_order(),
        aut.is_complete(),
        aut.generators().len(),
        t3.elapsed()
    );
}

fn classify_probe(name: &str, l: moufang_core::LoopTable) {
    use moufang_core::classify::*;
    let t0 = Instant::now();
    let p = pipeline_for(name, l, Budgets::default()).unwrap();
    println!(
        "{name}: pipeline |Aut|={:?} |AutC|={:?} ({:?})",
        p.aut.known_order(),
        p.central.autc.known_order(),
        t0.elapsed()
    );
    let opts = ClassifyOptions::counts_only();
    let t1 = Instant::now();
    let a = classify_centrally_affine(&p, &opts).unwrap();
    println!(
        "{name}: c={} phi_orbits={:?} pairs={:?} ({:?})",
        a.count,
        a.phi_orbit_count,
        a.pair_orbit_count,
        t1.elapsed()
    );
    let t2 = Instant::now();
    let t = classify_trimedial(&p, &opts).unwrap();
    println!(
        "{name}: t={} pairs={:?} ({:?})",
        t.count,
        t.pair_orbit_count,
        t2.elapsed()
    );
    let t3 = Instant::now();
    let d = classify_distributive(&p, &ClassifyOptions::default()).unwrap();
    let d = tag_steiner_mendelsohn(d).unwrap();
    println!(
        "{name}: d={} dM={:?} dS={:?} ({:?})",
        d.count,
        d.mendelsohn_count(),
        d.steiner_count(),
        t3.elapsed()
    );
}

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_default();
    if arg == "classify" {
        classify_probe("81/1", construct_kn_81_1());
        classify_probe("81/2", construct_kn_81_2());
        classify_probe("243/56", construct_kn_243_56());
        classify_probe("243/57", construct_kn_243_57());
        return;
    }
    probe("81/1", construct_kn_81_1());
    probe("81/2", construct_kn_81_2());
    probe("243/56", construct_kn_243_56());
    probe("243/57", construct_kn_243_57());
}
