//! Tracks landmark detections over a few noisy frames and labels the room
//! from the landmarks it settles on.

use ontosearch::envmodel::RoomLabel;
use ontosearch::semantic_map::{label_room, Detection, FrequencyTable, LandmarkTracker, Point2};

fn det(category: &str, x: f64, y: f64) -> Detection {
    Detection {
        category: category.into(),
        position: Point2::new(x, y),
    }
}

fn main() {
    let frames = [
        vec![det("sofa", 1.00, 5.50), det("table", 3.00, 4.00)],
        vec![det("sofa", 1.08, 5.46), det("table", 2.95, 4.06), det("tv", 6.20, 6.30)],
        vec![det("table", 3.02, 3.97), det("tv", 6.26, 6.22)],
    ];
    let mut tracker = LandmarkTracker::new();
    for f in &frames {
        tracker.observe(f).expect("detections are finite");
    }
    for t in tracker.tracks() {
        println!(
            "track {} {:>5} at ({:.2}, {:.2}) var {:.4}",
            t.id, t.category, t.mean.x, t.mean.y, t.variance[0]
        );
    }

    let table = FrequencyTable::reference();
    let cats: Vec<&str> = tracker.tracks().iter().map(|t| t.category.as_str()).collect();
    let posterior = label_room(&cats, &table).expect("known categories");
    for r in RoomLabel::ALL {
        println!("P({}) = {:.3}", r.as_str(), posterior[r.index()]);
    }
}
