//! Drives the command-line front end in-process: generate an instance,
//! compute its equilibrium, verify it and certify it.

use persuasion_poa::cli::run_from_args;

fn main() {
    let dir = std::env::temp_dir().join("persuade-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (inst, prof) = (path("instance.json"), path("profile.json"));
    let steps: Vec<Vec<&str>> = vec![
        vec!["equilibrium", "bernoulli", "--n", "3", "--zeta", "0.2", "--epsilon", "0.1", "--instance-out", &inst, "--profile-out", &prof],
        vec!["verify-ne", "--instance", &inst, "--profile", &prof, "--epsilon", "0.1"],
        vec!["certify", "general", "--instance", &inst, "--profile", &prof],
        vec!["sweep", "--n", "2,10", "--zeta", "0.05,0.5"],
    ];
    for step in steps {
        let out = run_from_args(std::iter::once("persuade").chain(step.iter().copied()))
            .expect("arguments parse");
        println!("$ persuade {} -> exit {}", step.join(" "), out.exit_code);
        print!("{}", out.csv);
        for w in out.warnings {
            println!("warning: {w}");
        }
    }
}
