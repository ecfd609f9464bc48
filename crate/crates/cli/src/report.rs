use std::fmt::Display;

use wavecast::codec::{LinkSummary, Roundtrip};
use wavecast::transit::Metrics;

/// Flat `key=value` report, one entry per line, in insertion order.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.6}")
    }
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn push_f64(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, fmt_f64(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> Report {
        Report {
            entries: text
                .lines()
                .filter_map(|l| l.split_once('='))
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    pub fn add_metrics(&mut self, m: &Metrics) {
        self.push_f64("mse", m.mse);
        self.push_f64("psnr", m.psnr);
    }

    pub fn add_link(&mut self, link: &LinkSummary) {
        self.push("packets", link.packets_received);
        self.push("packets_expected", link.packets_expected);
        self.push("packets_lost", link.packets_lost);
        self.push("packets_uncorrectable", link.packets_uncorrectable);
        self.push("bits_corrected", link.fec.corrected);
        self.push("words_uncorrectable", link.fec.uncorrectable);
        self.push("resyncs", link.resyncs);
        self.push("skipped_bytes", link.skipped_bytes);
    }

    pub fn add_stage_mse(&mut self, stage_mse: &[f64]) {
        for (i, &m) in stage_mse.iter().enumerate() {
            self.push_f64(format!("stage_{:02}_mse", i + 1), m);
        }
    }

    pub fn from_roundtrip(rt: &Roundtrip) -> Report {
        let mut r = Report::default();
        r.add_metrics(&rt.metrics);
        r.add_link(&rt.link);
        r.push("payload_bytes", rt.payload_bytes);
        r.push("coded_payload_bytes", rt.coded_payload_bytes);
        r.push("stream_bytes", rt.stream_bytes);
        r.add_stage_mse(&rt.stage_mse);
        r
    }
}
