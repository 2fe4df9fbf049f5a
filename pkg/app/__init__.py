# Citation impact scores
