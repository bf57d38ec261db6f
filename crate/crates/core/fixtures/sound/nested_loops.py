class Cell:
    def __init__(self, v):
        self.v = v
    def get(self):
        return self.v

def main():
    grid = []
    for i in range(3):
        row = []
        for j in range(3):
            row.append(Cell(i * j))
        grid.append(row)
    s = 0
    for row in grid:
        for cell in row:
            s = s + cell.get()
    print(s)
