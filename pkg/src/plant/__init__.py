"""Line-follower world: track, robot, sensors."""
