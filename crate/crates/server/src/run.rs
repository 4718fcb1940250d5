//! A run owns one worker thread that steps an [`Engine`]. Control requests only
//! touch shared state; the worker notices them between generations and records
//! what it did in an append-only event log.

use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread;

use moga_vrptw::ga::ConfigPatch;
use moga_vrptw::{Archive, Engine, GaConfig, GenerationSnapshot, Instance};
use serde::{Deserialize, Serialize};
use tokio::sync::watch;
use uuid::Uuid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Paused,
    Cancelled,
    Finished,
}

impl RunStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, RunStatus::Cancelled | RunStatus::Finished)
    }
}

/// One frame of the event stream. `seq` is the frame's position in the run's
/// log and doubles as the stream event id.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Snapshot { seq: usize, snapshot: GenerationSnapshot },
    Status { seq: usize, status: RunStatus, generation_index: usize },
    Config { seq: usize, generation_index: usize, config: GaConfig },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHandle {
    pub id: Uuid,
    pub instance_id: Uuid,
    pub status: RunStatus,
    pub config: GaConfig,
    pub latest_generation: usize,
    pub events: usize,
}

struct RunState {
    status: RunStatus,
    config: GaConfig,
    pending: Option<ConfigPatch>,
    pause_at: Option<usize>,
    generation: usize,
    archive: Archive,
    events: Vec<Arc<Event>>,
    closed: bool,
}

pub struct Run {
    pub id: Uuid,
    pub instance_id: Uuid,
    pub instance: Arc<Instance>,
    state: Mutex<RunState>,
    wake: Condvar,
    published: watch::Sender<usize>,
}

#[derive(Debug, PartialEq, Eq)]
pub struct IllegalTransition {
    pub from: RunStatus,
    pub to: RunStatus,
}

fn merge(into: &mut ConfigPatch, patch: &ConfigPatch) {
    into.mutation_rate = patch.mutation_rate.or(into.mutation_rate);
    into.crossover_rate = patch.crossover_rate.or(into.crossover_rate);
    into.fitness_params = patch.fitness_params.or(into.fitness_params);
}

impl Run {
    /// Starts the worker. The initial snapshot is recorded before this returns.
    pub fn start(instance_id: Uuid, engine: Engine, start_paused: bool, pause_at: Option<usize>) -> Arc<Run> {
        let state = RunState {
            status: if start_paused { RunStatus::Paused } else { RunStatus::Running },
            config: engine.config().clone(),
            pending: None,
            pause_at,
            generation: engine.generation(),
            archive: engine.archive().clone(),
            events: Vec::new(),
            closed: false,
        };
        let run = Arc::new(Run {
            id: Uuid::new_v4(),
            instance_id,
            instance: engine.instance().clone(),
            state: Mutex::new(state),
            wake: Condvar::new(),
            published: watch::channel(0).0,
        });
        run.publish_snapshot(&engine, engine.snapshot());
        let worker = run.clone();
        thread::Builder::new()
            .name(format!("run-{}", run.id))
            .spawn(move || worker.work(engine))
            .expect("spawn run worker");
        run
    }

    fn lock(&self) -> MutexGuard<'_, RunState> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn push(&self, st: &mut RunState, make: impl FnOnce(usize) -> Event) {
        let seq = st.events.len();
        st.events.push(Arc::new(make(seq)));
        self.published.send_replace(st.events.len());
    }

    fn publish_snapshot(&self, engine: &Engine, snapshot: GenerationSnapshot) {
        let mut st = self.lock();
        st.generation = snapshot.generation_index;
        st.archive = engine.archive().clone();
        self.push(&mut st, |seq| Event::Snapshot { seq, snapshot });
    }

    fn work(&self, mut engine: Engine) {
        let mut announced = RunStatus::Running;
        loop {
            let mut st = self.lock();
            loop {
                if let Some(patch) = st.pending.take() {
                    engine.apply(&patch).expect("patches are validated on receipt");
                    st.config = engine.config().clone();
                    let (generation_index, config) = (engine.generation(), st.config.clone());
                    self.push(&mut st, |seq| Event::Config { seq, generation_index, config });
                }
                if st.status == RunStatus::Running && st.pause_at == Some(engine.generation()) {
                    st.pause_at = None;
                    st.status = RunStatus::Paused;
                }
                if st.status == RunStatus::Running && engine.is_done() {
                    st.status = RunStatus::Finished;
                }
                if st.status != announced {
                    announced = st.status;
                    let generation_index = engine.generation();
                    self.push(&mut st, |seq| Event::Status { seq, status: announced, generation_index });
                }
                match st.status {
                    RunStatus::Running => break,
                    RunStatus::Paused => st = self.wake.wait(st).unwrap_or_else(|p| p.into_inner()),
                    RunStatus::Cancelled | RunStatus::Finished => {
                        st.closed = true;
                        self.published.send_replace(st.events.len());
                        return;
                    }
                }
            }
            drop(st);
            let snapshot = engine.step();
            self.publish_snapshot(&engine, snapshot);
        }
    }

    pub fn handle(&self) -> RunHandle {
        let st = self.lock();
        RunHandle {
            id: self.id,
            instance_id: self.instance_id,
            status: st.status,
            config: st.config.clone(),
            latest_generation: st.generation,
            events: st.events.len(),
        }
    }

    pub fn transition(&self, to: RunStatus) -> Result<RunHandle, IllegalTransition> {
        {
            let mut st = self.lock();
            let legal = matches!(
                (st.status, to),
                (RunStatus::Running, RunStatus::Paused)
                    | (RunStatus::Paused, RunStatus::Running)
                    | (RunStatus::Running | RunStatus::Paused, RunStatus::Cancelled)
            );
            if !legal {
                return Err(IllegalTransition { from: st.status, to });
            }
            st.status = to;
        }
        self.wake.notify_all();
        Ok(self.handle())
    }

    /// Queues a patch for the next generation boundary. Patches sent before the
    /// worker picks them up are merged, later values winning.
    pub fn queue_patch(&self, patch: &ConfigPatch) -> Result<RunHandle, RunStatus> {
        {
            let mut st = self.lock();
            if st.status.is_terminal() {
                return Err(st.status);
            }
            merge(st.pending.get_or_insert_with(ConfigPatch::default), patch);
        }
        self.wake.notify_all();
        Ok(self.handle())
    }

    pub fn archive(&self) -> (Archive, GaConfig, usize) {
        let st = self.lock();
        (st.archive.clone(), st.config.clone(), st.generation)
    }

    /// Events from `from` onwards, and whether the log is complete.
    pub fn events_since(&self, from: usize) -> (Vec<Arc<Event>>, bool) {
        let st = self.lock();
        let tail = st.events.get(from..).map(<[_]>::to_vec).unwrap_or_default();
        (tail, st.closed)
    }

    pub fn event_at(&self, seq: usize) -> (Option<Arc<Event>>, bool) {
        let st = self.lock();
        (st.events.get(seq).cloned(), st.closed)
    }

    pub fn subscribe(&self) -> watch::Receiver<usize> {
        self.published.subscribe()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use moga_vrptw::io::{generate_random_instance, GeneratorParams};
    use std::time::{Duration, Instant};

    fn engine(generations: usize) -> Engine {
        let inst = generate_random_instance(&GeneratorParams { customers: 8, ..Default::default() }).unwrap();
        let config = GaConfig { population_size: 10, generations, ..GaConfig::default() };
        Engine::new(Arc::new(inst), config).unwrap()
    }

    fn wait_closed(run: &Run) {
        let deadline = Instant::now() + Duration::from_secs(20);
        while !run.events_since(0).1 {
            assert!(Instant::now() < deadline, "run did not finish");
            thread::sleep(Duration::from_millis(5));
        }
    }

    #[test]
    fn transitions_follow_the_state_machine() {
        let run = Run::start(Uuid::nil(), engine(1_000_000), true, None);
        assert_eq!(run.transition(RunStatus::Paused).unwrap_err().from, RunStatus::Paused);
        assert_eq!(run.transition(RunStatus::Running).unwrap().status, RunStatus::Running);
        assert!(run.transition(RunStatus::Running).is_err());
        assert_eq!(run.transition(RunStatus::Cancelled).unwrap().status, RunStatus::Cancelled);
        assert!(run.transition(RunStatus::Running).is_err());
        assert!(run.transition(RunStatus::Cancelled).is_err());
        assert_eq!(run.queue_patch(&ConfigPatch::default()).unwrap_err(), RunStatus::Cancelled);
        wait_closed(&run);
        let (events, _) = run.events_since(0);
        assert!(matches!(*events[0], Event::Snapshot { seq: 0, .. }));
        let last = events.last().unwrap();
        assert!(matches!(**last, Event::Status { status: RunStatus::Cancelled, .. }));
    }

    #[test]
    fn finishes_with_status_event() {
        let run = Run::start(Uuid::nil(), engine(3), false, None);
        wait_closed(&run);
        let (events, closed) = run.events_since(0);
        assert!(closed);
        let kinds: Vec<_> = events
            .iter()
            .map(|e| match &**e {
                Event::Snapshot { snapshot, .. } => format!("s{}", snapshot.generation_index),
                Event::Status { status, generation_index, .. } => format!("{status:?}@{generation_index}"),
                Event::Config { .. } => "c".into(),
            })
            .collect();
        assert_eq!(kinds, ["s0", "s1", "s2", "s3", "Finished@3"]);
        assert!(run.transition(RunStatus::Paused).is_err());
    }

    #[test]
    fn pause_at_then_patch_then_resume() {
        let run = Run::start(Uuid::nil(), engine(4), false, Some(2));
        let deadline = Instant::now() + Duration::from_secs(20);
        while run.handle().events < 4 {
            assert!(Instant::now() < deadline);
            thread::sleep(Duration::from_millis(5));
        }
        assert_eq!(run.handle().status, RunStatus::Paused);
        run.queue_patch(&ConfigPatch { mutation_rate: Some(0.7), ..Default::default() }).unwrap();
        run.queue_patch(&ConfigPatch { crossover_rate: Some(0.5), ..Default::default() }).unwrap();
        run.transition(RunStatus::Running).unwrap();
        wait_closed(&run);
        let (events, _) = run.events_since(3);
        match &*events[0] {
            Event::Status { status: RunStatus::Paused, generation_index: 2, .. } => {}
            other => panic!("unexpected {other:?}"),
        }
        let config = events
            .iter()
            .filter_map(|e| match &**e {
                Event::Config { generation_index, config, .. } => Some((*generation_index, config.clone())),
                _ => None,
            })
            .next_back();
        let (at, config) = config.expect("config event");
        assert_eq!(at, 2);
        assert_eq!((config.mutation_rate, config.crossover_rate), (0.7, 0.5));
        assert_eq!(run.handle().config.mutation_rate, 0.7);
    }
}
