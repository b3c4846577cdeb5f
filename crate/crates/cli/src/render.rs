use crate::{Cli, Command};

/// Comment lines that identify the run. Thread counts are left out on purpose:
/// they never change results, and leaving them out keeps output bytes identical.
pub fn preamble(cli: &Cli, seed: Option<u64>) -> String {
    let mut command = cli.command.clone();
    match &mut command {
        Command::Mc(a) => a.threads.threads = None,
        Command::Bounds(a) => a.threads.threads = None,
        Command::Sweep(a) => a.threads.threads = None,
        _ => {}
    }
    let mut out = format!(
        "# anticonc {}\n# format: {:?}\n# args: {:?}\n",
        env!("CARGO_PKG_VERSION"),
        cli.format,
        command
    );
    if let Some(s) = seed {
        out.push_str(&format!("# seed: {s}\n"));
    }
    out
}

pub fn key_values<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{}={}\n", k.as_ref(), v.as_ref()))
        .collect()
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Pairs as `key=value` lines, or as a one-row CSV with the keys as header.
pub fn pairs(format: crate::Format, pairs: &[(String, String)]) -> String {
    match format {
        crate::Format::Structured => key_values(pairs),
        crate::Format::Csv => {
            let header: Vec<&str> = pairs.iter().map(|(k, _)| k.as_str()).collect();
            csv_table(&header, &[pairs.iter().map(|(_, v)| v.clone()).collect()])
        }
    }
}
