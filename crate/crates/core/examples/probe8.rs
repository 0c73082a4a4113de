use paroforge_core::bench::{run_benchmark, ComparisonOptions, FacilityLocationConfig};

fn main() {
    let seed = 7u64;
    let config = FacilityLocationConfig::desk(seed);
    let options = ComparisonOptions { deterministic: true, seed, ..Default::default() };
    let report = run_benchmark(&config, 30, seed, &options);
    let mut differing = 0;
    for row in &report.rows {
        let flag = if row.l1_paro_aro > 0.5 || row.l1_paro_pro > 0.5 { "DIFF" } else { "" };
        if !flag.is_empty() { differing += 1; }
        println!(
            "{:2} status={} wc_gap={:+.2e} imp_max_aro={:+.3} l1_pa={:.0} l1_pp={:.0} {}",
            row.instance, row.status, row.wc_aro - row.wc_paro, row.imp_max_aro,
            row.l1_paro_aro, row.l1_paro_pro, flag
        );
    }
    println!("differing: {differing}/30");
}
