//! Seeded Fruchterman-Reingold layout.
//!
//! Nodes are visited in id order and all arithmetic is sequential, so a given
//! (graph, seed, iterations) triple always yields bit-identical positions.

use std::collections::{BTreeMap, BTreeSet};
use std::num::NonZeroU32;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PatternGraph;
use crate::model::PatternId;

pub const DEFAULT_ITERATIONS: NonZeroU32 = NonZeroU32::new(300).unwrap();

/// Ideal edge length in canvas units.
const IDEAL_DISTANCE: f64 = 80.0;
/// Pull towards the origin; keeps disconnected components on the canvas.
const GRAVITY: f64 = 0.05;
/// Smallest distance used in force terms.
const MIN_DISTANCE: f64 = 0.01;
/// Pairs closer than this after the last iteration are pushed apart.
const MIN_SEPARATION: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub positions: BTreeMap<PatternId, Point>,
    pub seed: u64,
    pub iterations: u32,
}

pub fn layout(graph: &PatternGraph, seed: u64, iterations: NonZeroU32) -> LayoutResult {
    let ids: Vec<&PatternId> = graph.nodes().iter().map(|n| &n.id).collect();
    let coordinates = match ids.len() {
        0 => Vec::new(),
        1 => vec![Point { x: 0.0, y: 0.0 }],
        _ => force_directed(graph, &ids, seed, iterations.get()),
    };
    LayoutResult {
        positions: ids.into_iter().cloned().zip(coordinates).collect(),
        seed,
        iterations: iterations.get(),
    }
}

fn force_directed(graph: &PatternGraph, ids: &[&PatternId], seed: u64, iterations: u32) -> Vec<Point> {
    let n = ids.len();
    let index: BTreeMap<&PatternId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let springs: BTreeSet<(usize, usize)> = graph
        .edges()
        .iter()
        .filter_map(|e| {
            let (a, b) = (index[&e.source], index[&e.target]);
            (a != b).then(|| (a.min(b), a.max(b)))
        })
        .collect();

    let side = IDEAL_DISTANCE * (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| Point {
            x: rng.random_range(-side / 2.0..side / 2.0),
            y: rng.random_range(-side / 2.0..side / 2.0),
        })
        .collect();

    let k2 = IDEAL_DISTANCE * IDEAL_DISTANCE;
    let initial_temperature = side / 4.0;
    let mut disp = vec![Point { x: 0.0, y: 0.0 }; n];
    for step in 0..iterations {
        let temperature = initial_temperature * (1.0 - f64::from(step) / f64::from(iterations));
        disp.iter_mut().for_each(|d| *d = Point { x: 0.0, y: 0.0 });

        for i in 0..n {
            for j in (i + 1)..n {
                let (dx, dy, d) = separation(pos[i], pos[j], i, j);
                let force = k2 / d;
                disp[i].x += dx / d * force;
                disp[i].y += dy / d * force;
                disp[j].x -= dx / d * force;
                disp[j].y -= dy / d * force;
            }
        }
        for &(i, j) in &springs {
            let (dx, dy, d) = separation(pos[i], pos[j], i, j);
            let force = d * d / IDEAL_DISTANCE;
            disp[i].x -= dx / d * force;
            disp[i].y -= dy / d * force;
            disp[j].x += dx / d * force;
            disp[j].y += dy / d * force;
        }
        for (p, d) in pos.iter().zip(disp.iter_mut()) {
            d.x -= p.x * GRAVITY;
            d.y -= p.y * GRAVITY;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let length = d.x.hypot(d.y);
            if length > 0.0 {
                let capped = length.min(temperature);
                p.x += d.x / length * capped;
                p.y += d.y / length * capped;
            }
        }
    }

    let (cx, cy) = pos.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    let (cx, cy) = (cx / n as f64, cy / n as f64);
    for p in &mut pos {
        p.x -= cx;
        p.y -= cy;
    }
    separate_coincident(&mut pos);
    pos
}

/// Vector from `b` to `a` and its length, never shorter than `MIN_DISTANCE`.
/// Coincident points get a fixed direction derived from their indices.
fn separation(a: Point, b: Point, i: usize, j: usize) -> (f64, f64, f64) {
    let (mut dx, mut dy) = (a.x - b.x, a.y - b.y);
    let mut d = dx.hypot(dy);
    if d < MIN_DISTANCE {
        let angle = (i * 31 + j * 17) as f64;
        dx = angle.cos() * MIN_DISTANCE;
        dy = angle.sin() * MIN_DISTANCE;
        d = MIN_DISTANCE;
    }
    (dx, dy, d)
}

fn separate_coincident(pos: &mut [Point]) {
    for j in 1..pos.len() {
        let mut attempt = 0usize;
        while let Some(i) = (0..j).find(|&i| pos[i].distance(pos[j]) < MIN_SEPARATION) {
            attempt += 1;
            if attempt > 64 {
                let right = pos[..j].iter().map(|p| p.x).fold(f64::MIN, f64::max);
                pos[j].x = right + MIN_SEPARATION * 2.0;
                break;
            }
            let angle = (j + attempt) as f64;
            pos[j].x = pos[i].x + angle.cos() * MIN_SEPARATION * 2.0;
            pos[j].y = pos[i].y + angle.sin() * MIN_SEPARATION * 2.0;
        }
    }
}
