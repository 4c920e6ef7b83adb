use std::io::Write;
use std::process::ExitCode;

use clap::{Arg, ArgMatches};
use sheafwork_cli::{input_names, option_names, run, verbs, Command, ACTIONS};

fn cli() -> clap::Command {
    let mut actions = String::from("Actions:\n");
    for a in ACTIONS {
        let flags: Vec<String> = a.inputs.iter().map(|i| format!("--{i}")).collect();
        actions.push_str(&format!("  {} {} {}  {}\n", a.verb, a.action, flags.join(" "), a.about));
    }
    let mut cmd = clap::Command::new("sheafwork")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Sheaves, cosheaves, Galois connections and modal operators on finite structures")
        .after_help(actions)
        .arg(Arg::new("verb").required(true).value_parser(verbs()))
        .arg(Arg::new("action").required(true));
    for name in input_names() {
        cmd = cmd.arg(
            Arg::new(name)
                .long(name)
                .value_name("FILE|JSON")
                .help_heading("Inputs"),
        );
    }
    for name in option_names() {
        cmd = cmd.arg(Arg::new(name).long(name).value_name("VALUE").help_heading("Parameters"));
    }
    cmd
}

fn collect(m: &ArgMatches, names: Vec<&str>) -> std::collections::BTreeMap<String, String> {
    names
        .into_iter()
        .filter_map(|n| m.get_one::<String>(n).map(|v| (n.to_string(), v.clone())))
        .collect()
}

fn main() -> ExitCode {
    let m = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command = Command {
        verb: m.get_one::<String>("verb").cloned().unwrap_or_default(),
        action: m.get_one::<String>("action").cloned().unwrap_or_default(),
        inputs: collect(&m, input_names()),
        options: collect(&m, option_names()),
    };
    let out = run(&command);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
