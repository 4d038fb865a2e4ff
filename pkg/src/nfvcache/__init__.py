"""Energy-efficient placement of virtualised mobile functions and video caches."""
