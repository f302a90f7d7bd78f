"""Learning algorithms: SAC, discriminator shaping and RND."""
