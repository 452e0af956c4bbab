# Test package for topos-measure
