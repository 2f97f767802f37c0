use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::command::{Ack, ControlCommand, ControlError};
use super::snapshot::PlantSnapshot;
use crate::events::Event;
use crate::plant::{ActuatorImage, FaultSet, Flow, SensorImage};
use crate::scan::CycleRecord;

/// Wall-clock measurements; everything outside this block is a pure
/// function of configuration and inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_start_ms: f64,
    pub exec_duration_ms: f64,
    pub overrun: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommandOutcome {
    Accepted(Ack),
    Rejected(ControlError),
}

impl From<&Result<Ack, ControlError>> for CommandOutcome {
    fn from(result: &Result<Ack, ControlError>) -> Self {
        match result {
            Ok(ack) => CommandOutcome::Accepted(*ack),
            Err(err) => CommandOutcome::Rejected(err.clone()),
        }
    }
}

/// A command applied in the gap before a cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedCommand {
    pub command: ControlCommand,
    /// Wall-clock arrival (ms since the Unix epoch), for live requests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub received_at_ms: Option<f64>,
    pub outcome: CommandOutcome,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleLogLine {
    pub cycle: u64,
    pub timing: Timing,
    pub commands: Vec<AppliedCommand>,
    pub faults: FaultSet,
    pub sensors: SensorImage,
    pub actuators: ActuatorImage,
    pub flows: Vec<Flow>,
    pub events: Vec<Event>,
    /// State after the cycle's WRITE.
    pub snapshot: PlantSnapshot,
}

impl CycleLogLine {
    pub fn new(record: CycleRecord, commands: Vec<AppliedCommand>, snapshot: PlantSnapshot) -> Self {
        CycleLogLine {
            cycle: record.cycle_index,
            timing: Timing {
                wall_start_ms: record.wall_start_ms,
                exec_duration_ms: record.exec_duration_ms,
                overrun: record.overrun,
            },
            commands,
            faults: record.faults,
            sensors: record.sensors,
            actuators: record.actuators,
            flows: record.flows,
            events: record.events,
            snapshot,
        }
    }

    /// The line without wall-clock data, for run-to-run comparison.
    pub fn deterministic_part(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("log lines serialize");
        strip_timing(&mut value);
        value
    }
}

/// Removes wall-clock data from a parsed log line: the `timing` block,
/// command arrival stamps and the overrun counter.
pub fn strip_timing(line: &mut serde_json::Value) {
    if let Some(obj) = line.as_object_mut() {
        obj.remove("timing");
        if let Some(commands) = obj.get_mut("commands").and_then(|c| c.as_array_mut()) {
            for c in commands.iter_mut().filter_map(|c| c.as_object_mut()) {
                c.remove("received_at_ms");
            }
        }
        if let Some(snapshot) = obj.get_mut("snapshot").and_then(|s| s.as_object_mut()) {
            snapshot.remove("overruns");
        }
    }
}

/// JSON-lines writer with size-based rotation: `run.jsonl` is moved to
/// `run.jsonl.1`, `.1` to `.2` and so on, dropping the oldest.
#[derive(Debug)]
pub struct RunLog {
    path: PathBuf,
    max_bytes: u64,
    max_files: usize,
    out: BufWriter<File>,
    written: u64,
}

impl RunLog {
    pub fn create(path: impl Into<PathBuf>, max_bytes: u64, max_files: usize) -> io::Result<Self> {
        let path = path.into();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let out = BufWriter::new(File::create(&path)?);
        Ok(RunLog {
            path,
            max_bytes: max_bytes.max(1),
            max_files,
            out,
            written: 0,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn rotated_path(&self, n: usize) -> PathBuf {
        let mut name = self.path.clone().into_os_string();
        name.push(format!(".{n}"));
        PathBuf::from(name)
    }

    pub fn write_line(&mut self, line: &CycleLogLine) -> io::Result<()> {
        let mut text = serde_json::to_string(line).map_err(io::Error::other)?;
        text.push('\n');
        if self.written > 0 && self.written + text.len() as u64 > self.max_bytes {
            self.rotate()?;
        }
        self.out.write_all(text.as_bytes())?;
        self.written += text.len() as u64;
        Ok(())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    fn rotate(&mut self) -> io::Result<()> {
        self.out.flush()?;
        if self.max_files > 0 {
            let oldest = self.rotated_path(self.max_files);
            if oldest.exists() {
                std::fs::remove_file(&oldest)?;
            }
            for n in (1..self.max_files).rev() {
                let from = self.rotated_path(n);
                if from.exists() {
                    std::fs::rename(&from, self.rotated_path(n + 1))?;
                }
            }
            std::fs::rename(&self.path, self.rotated_path(1))?;
        }
        self.out = BufWriter::new(
            OpenOptions::new()
                .write(true)
                .create(true)
                .truncate(true)
                .open(&self.path)?,
        );
        self.written = 0;
        Ok(())
    }
}

impl Drop for RunLog {
    fn drop(&mut self) {
        let _ = self.out.flush();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::service::{LiqueurPlant, SystemConfig};

    fn line(plant: &mut LiqueurPlant) -> CycleLogLine {
        let record = plant.run_cycle();
        CycleLogLine::new(record, Vec::new(), plant.snapshot())
    }

    #[test]
    fn rotation_keeps_bounded_history() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = SystemConfig::default();
        config.cycle.time_scale = 0.0;
        let mut plant = LiqueurPlant::new(&config).unwrap();
        let sample = serde_json::to_string(&line(&mut plant)).unwrap().len() as u64;
        let mut log = RunLog::create(dir.path().join("run.jsonl"), sample * 3, 2).unwrap();
        for _ in 0..20 {
            let l = line(&mut plant);
            log.write_line(&l).unwrap();
        }
        log.flush().unwrap();
        assert!(log.rotated_path(1).exists());
        assert!(log.rotated_path(2).exists());
        assert!(!log.rotated_path(3).exists());
        let active = std::fs::read_to_string(log.path()).unwrap();
        let last: serde_json::Value =
            serde_json::from_str(active.lines().last().unwrap()).unwrap();
        assert_eq!(last["cycle"], 20);
    }

    #[test]
    fn timing_is_stripped() {
        let mut config = SystemConfig::default();
        config.cycle.time_scale = 0.0;
        let mut plant = LiqueurPlant::new(&config).unwrap();
        let v = line(&mut plant).deterministic_part();
        assert!(v.get("timing").is_none());
        assert!(v.get("sensors").is_some());
    }
}
