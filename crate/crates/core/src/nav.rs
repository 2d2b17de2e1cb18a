//! Deterministic stand-in for the robot navigation stack: grid shortest paths,
//! rotate-then-translate kinematics, and artwork proximity notifications.

use crate::geometry::{normalize_angle, Point, Pose};
use crate::museum::{AreaId, Artwork, ArtworkId, Cell, OccupancyGrid};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

/// Waypoints closer than this are considered reached.
pub const ARRIVAL_TOLERANCE_M: f64 = 1e-6;
const ALIGNED_RAD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NavError {
    #[error("{which} point ({x:.3}, {y:.3}) is outside the grid")]
    OutOfBounds { which: &'static str, x: f64, y: f64 },
    #[error("{which} cell {cell:?} is occupied")]
    OccupiedEndpoint { which: &'static str, cell: Cell },
    #[error("no path from {from:?} to {to:?}")]
    NoPath { from: Cell, to: Cell },
}

/// Cell-center waypoints of a 4-connected route, start cell first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<Point>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }
}

/// Neighbor expansion order: north (+row), east (+col), south, west.
const NEIGHBORS: [(isize, isize); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

fn endpoint_cell(grid: &OccupancyGrid, p: Point, which: &'static str) -> Result<Cell, NavError> {
    let cell = grid.cell_of(p).ok_or(NavError::OutOfBounds { which, x: p.x, y: p.y })?;
    if grid.is_occupied(cell) {
        return Err(NavError::OccupiedEndpoint { which, cell });
    }
    Ok(cell)
}

/// Breadth-first shortest path over free cells. Among equal-length routes the
/// one found by expanding neighbors north, east, south, west wins.
pub fn plan_path(grid: &OccupancyGrid, start: Pose, goal: Point) -> Result<Path, NavError> {
    let from = endpoint_cell(grid, start.position(), "start")?;
    let to = endpoint_cell(grid, goal, "goal")?;
    let cells = bfs_route(grid, from, to).ok_or(NavError::NoPath { from, to })?;
    Ok(Path {
        waypoints: cells.into_iter().map(|c| grid.cell_center(c)).collect(),
    })
}

fn bfs_route(grid: &OccupancyGrid, from: Cell, to: Cell) -> Option<Vec<Cell>> {
    let w = grid.width();
    let index = |(r, c): Cell| r * w + c;
    let mut parent: Vec<Option<usize>> = vec![None; w * grid.height()];
    let mut seen = vec![false; w * grid.height()];
    let mut queue = VecDeque::new();
    seen[index(from)] = true;
    queue.push_back(from);
    while let Some(cell) = queue.pop_front() {
        if cell == to {
            let mut route = vec![cell];
            let mut at = index(cell);
            while let Some(p) = parent[at] {
                route.push((p / w, p % w));
                at = p;
            }
            route.reverse();
            return Some(route);
        }
        for (dr, dc) in NEIGHBORS {
            let (Some(r), Some(c)) = (cell.0.checked_add_signed(dr), cell.1.checked_add_signed(dc)) else {
                continue;
            };
            let next = (r, c);
            if !grid.in_bounds(next) || grid.is_occupied(next) || seen[index(next)] {
                continue;
            }
            seen[index(next)] = true;
            parent[index(next)] = Some(index(cell));
            queue.push_back(next);
        }
    }
    None
}

/// Motion and trigger parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NavConfig {
    pub linear_speed: f64,
    pub angular_speed: f64,
    pub fov_half_angle: f64,
    /// An artwork re-arms once the robot is farther than `radius * rearm_factor`.
    pub rearm_factor: f64,
}

impl Default for NavConfig {
    fn default() -> Self {
        Self {
            linear_speed: 0.7,
            angular_speed: std::f64::consts::FRAC_PI_2,
            fov_half_angle: std::f64::consts::FRAC_PI_3,
            rearm_factor: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Notification {
    pub artwork_id: ArtworkId,
    pub utterance: String,
    pub logical_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NavState {
    pub pose: Pose,
    pub path: Option<Path>,
    pub target_area: Option<AreaId>,
    pub linear_speed: f64,
    pub angular_speed: f64,
    /// `true` = armed, may fire.
    pub trigger_arming: BTreeMap<ArtworkId, bool>,
}

impl NavState {
    pub fn new(pose: Pose, config: &NavConfig, artworks: &[Artwork]) -> Self {
        assert!(
            config.linear_speed > 0.0 && config.angular_speed > 0.0,
            "speeds must be strictly positive"
        );
        Self {
            pose,
            path: None,
            target_area: None,
            linear_speed: config.linear_speed,
            angular_speed: config.angular_speed,
            trigger_arming: artworks.iter().map(|a| (a.id.clone(), true)).collect(),
        }
    }

    pub fn set_path(&mut self, path: Path, target: Option<AreaId>) {
        self.path = Some(path);
        self.target_area = target;
    }

    pub fn is_moving(&self) -> bool {
        self.path.is_some()
    }

    /// Moves the robot along its path for `dt` seconds: turn in place toward
    /// the next waypoint, then drive straight to it. Returns `true` once the
    /// path is exhausted (immediately when there is no path).
    pub fn advance(&mut self, dt: f64) -> bool {
        assert!(dt > 0.0, "advance needs a positive time step");
        let mut remaining = dt;
        loop {
            let Some(path) = self.path.as_mut() else {
                return true;
            };
            let Some(&next) = path.waypoints.first() else {
                self.path = None;
                return true;
            };
            let here = self.pose.position();
            let dist = here.distance(next);
            if dist <= ARRIVAL_TOLERANCE_M {
                path.waypoints.remove(0);
                if path.waypoints.is_empty() {
                    self.path = None;
                    return true;
                }
                continue;
            }
            if remaining <= 0.0 {
                return false;
            }
            let desired = here.angle_to(next);
            let turn = normalize_angle(desired - self.pose.heading);
            if turn.abs() > ALIGNED_RAD {
                let max_turn = self.angular_speed * remaining;
                if turn.abs() <= max_turn {
                    self.pose.heading = normalize_angle(desired);
                    remaining -= turn.abs() / self.angular_speed;
                } else {
                    self.pose.heading = normalize_angle(self.pose.heading + turn.signum() * max_turn);
                    remaining = 0.0;
                }
                continue;
            }
            let reach = self.linear_speed * remaining;
            if reach >= dist {
                self.pose.x = next.x;
                self.pose.y = next.y;
                remaining -= dist / self.linear_speed;
            } else {
                let f = reach / dist;
                self.pose.x += (next.x - here.x) * f;
                self.pose.y += (next.y - here.y) * f;
                remaining = 0.0;
            }
        }
    }

    /// Fires a notification for every armed artwork within its trigger radius
    /// and inside the field of view, disarming it. Artworks farther than
    /// `radius * rearm_factor` re-arm.
    pub fn check_notifications(
        &mut self,
        artworks: &[Artwork],
        fov_half_angle: f64,
        rearm_factor: f64,
        now: f64,
    ) -> Vec<Notification> {
        debug_assert!(fov_half_angle > 0.0 && fov_half_angle <= std::f64::consts::PI);
        let here = self.pose.position();
        let mut fired = Vec::new();
        for art in artworks {
            let armed = self.trigger_arming.entry(art.id.clone()).or_insert(true);
            let dist = here.distance(art.position);
            if dist > art.trigger_radius * rearm_factor {
                *armed = true;
                continue;
            }
            if *armed && dist <= art.trigger_radius && self.pose.bearing_to(art.position).abs() <= fov_half_angle {
                *armed = false;
                fired.push(Notification {
                    artwork_id: art.id.clone(),
                    utterance: art.passing_utterance.clone(),
                    logical_time: now,
                });
            }
        }
        fired
    }
}

/// Qualitative direction of a point relative to a pose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelativeDirection {
    Ahead,
    Left,
    Right,
    Behind,
}

impl RelativeDirection {
    /// Quadrants of ±45° around the heading; the ±45° rays count as ahead and
    /// the ±135° rays as behind.
    pub fn of(pose: &Pose, target: Point) -> Self {
        use std::f64::consts::FRAC_PI_4;
        let b = pose.bearing_to(target);
        if b.abs() <= FRAC_PI_4 {
            Self::Ahead
        } else if b.abs() >= 3.0 * FRAC_PI_4 {
            Self::Behind
        } else if b > 0.0 {
            Self::Left
        } else {
            Self::Right
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ahead => "ahead",
            Self::Left => "left",
            Self::Right => "right",
            Self::Behind => "behind",
        }
    }
}
